"""Best known packings of n equal circles in a circle, n = 1..20.

WITNESSES[n] = (ratio, points): ratio is container radius over circle
radius; points are circle centres scaled so the closest pair is exactly 1
apart, all within (ratio - 1) / 2 of the origin.
"""
# generated by tools/gen_packings.py; do not edit
WITNESSES = {
    1: (1.0, [(0.0, 0.0)]),
    2: (1.9999999999999998, [(0.4768056836712026, -0.15052023126090738), (-0.47680568562724807, 0.1505202250647063)]),
    3: (2.1547005383792515, [(0.4993224486709561, -0.28984552021132537), (-0.5006748080116017, -0.28750316512323676), (0.0013523593406457128, 0.577348685334562)]),
    4: (2.414213562373095, [(0.5024709207143594, -0.4975168075919285), (0.49751680759192857, 0.5024709207143593), (-0.49751680759192835, -0.5024709207143594), (-0.5024709207143592, 0.49751680759192873)]),
    5: (2.7013016167040798, [(-0.7469253671730653, -0.4070740640514456), (0.8435474470129587, -0.10970187960057319), (-0.6179630732171028, 0.5845754338749215), (0.3650031841325561, 0.7683615511743637), (0.1563378092446533, -0.8361610413972667)]),
    6: (3.0, [(3.1519590117540366e-18, -4.4148492555426354e-17), (-0.41150096859064217, -0.911409322340387), (0.9950199540548386, 0.09967593005689447), (-0.5838872270946661, 0.8118347775475634), (0.41117094524824177, 0.911558255836492), (0.5837322602084702, -0.811946210282375)]),
    7: (3.0000000000000004, [(0.5035267364003116, 0.8639796442799167), (0.49646495209889485, -0.8680567673472988), (-0.5035267364003114, -0.8639796442799168), (-0.9999916884992062, 0.004077123067381971), (-0.49646495209889485, 0.8680567673472988), (0.9999916884992064, -0.004077123067382224), (-1.5030071792915087e-18, -1.470264298987061e-17)]),
    8: (3.3047648709624866, [(-1.1475414994136368, -0.10551675094118741), (1.0796811680356473, -0.40283228891793443), (-0.04900321286706194, -0.14306468257708985), (-0.7979767399076407, 0.8313954535430509), (0.35822323189845334, -1.0952905521978673), (0.9881171631598503, 0.592966904198381), (-0.6329841042805239, -0.9629726898172477), (0.1524807805078504, 1.142249924132805)]),
    9: (3.613125929752754, [(0.3722800455150193, 1.2524034289708263), (1.2524034289708266, -0.3722800455150192), (-0.3722800455150194, -1.2524034289708263), (-1.1488247020906628, -0.6223412127224491), (0.6223412127224491, -1.1488247020906628), (-1.2524034289708266, 0.3722800455150191), (0.09812053454522875, 0.23393115005968623), (-0.6223412127224495, 1.1488247020906628), (1.1488247020906628, 0.6223412127224492)]),
    10: (3.8130256313981246, [(0.207464655940481, 0.5108662174703509), (-0.29564190638484633, 1.3750906020749463), (1.3928754810955248, -0.19538729459361998), (-0.1687960328345866, -0.4156476216505292), (-0.9579042673196653, -1.029901798899526), (-1.134719067676792, 0.831078178137542), (-0.0313904281987853, -1.4061624876745935), (1.170675303512996, 0.7796137726274847), (-1.4002070290768238, -0.13303599681875167), (0.9109909600870781, -1.0716220282195246)]),
    11: (3.9238044001630876, [(0.4966487032250156, 1.374953856748716), (-0.765712792011033, -0.13694187276348324), (0.17481103829172084, -0.4766695940825377), (-0.0012380398275541598, 0.5077117964838185), (0.003564793607939061, -1.4618978537674208), (-1.2678230759045044, 0.7278617250599867), (0.94242061736327, -1.11758732212382), (1.4403073604158403, -0.2503452618589225), (-0.5033483237210258, 1.3725153943072883), (1.2642582822965651, 0.734036128707434), (-0.9369590366948145, -1.122170132448366)]),
    12: (4.0296019301161845, [(0.3083260201525697, -1.4830903644207942), (0.5482906710091592, -0.18086092285969163), (-0.43077548925297027, -0.38440318832210213), (0.25546242845915773, 1.493104454278627), (1.1653351736794129, -0.9677891798974091), (-1.4207976021385704, -0.525315274381219), (-0.8293908163390551, 1.2675696578544955), (-1.4385569417726136, 0.4745270161105184), (1.5124429329378697, 0.08448868768788688), (1.1302309216200437, 1.0085633483102754), (-0.6830521165988155, -1.3520583455423827), (-0.11751518175618933, 0.5652641111817936)]),
    13: (4.23606797749979, [(-0.2811894281864989, -0.5503621686909951), (0.5509817922177205, 0.27997334854348865), (-1.142858793846624, 1.1453854225007996), (-0.25135152685601964, 1.5983918163882853), (-0.4365332149077011, 0.4374983011766465), (-1.5978328459295268, 0.254880727436667), (1.5978328459295268, -0.25488072743666723), (0.7063255789389228, -0.707887121324153), (-1.4424890592083244, -0.7329797424309745), (0.7361634802694021, 1.4408668637551274), (-0.7361634802694019, -1.4408668637551276), (0.25135152685601947, -1.5983918163882858), (1.4424890592083244, 0.7329797424309744)]),
    14: (4.328428554860837, [(0.9691387604111596, 1.352915083910284), (1.5695665042993023, 0.5532360705746858), (-1.0868541572813524, -1.2603004411661096), (-0.7201591066350804, 0.04059351761551287), (-0.9383397424947628, 1.3744554153766182), (0.8109621776534546, -1.4532547978998096), (1.497452713381665, -0.726116059861741), (-1.5566729273414557, 0.5885393431924786), (0.01879205539778779, 1.6641081755274134), (-1.6129510218355574, -0.40987578894450644), (0.06094293076508569, 0.6649969186066585), (0.7669280360988365, -0.04322976194618088), (-0.014174001301329954, -0.6676331629373263), (-0.16833580145464935, -1.6556787789761245)]),
    15: (4.521356964706165, [(0.7463718821321029, 1.5946528561990336), (-1.733469830041965, 0.30833596377236716), (0.5971159078860349, 0.6058542649015651), (-1.2859633944143325, 1.2026166747752673), (-0.24242670916536543, 1.7439088304451023), (-0.12696471514379068, -0.8411223209845496), (0.7607206097082538, -0.3806717112093848), (-0.39168268341143303, 0.7551102391476344), (0.33348589463137485, -1.7288076458365937), (1.7472465858192043, -0.21706700938716605), (-0.8391891190390652, -0.13917047185526532), (1.2211712194834192, -1.2683570360614287), (-0.8289165642730748, -1.553346724879824), (-1.5411409681683492, -0.8513948757505396), (1.5836418839969848, 0.7694589667237843)]),
    16: (4.615425594873194, [(-1.6642211879378859, 0.7058281629650816), (-0.6687348655617475, 0.610923042123098), (-1.7848048319196725, -0.2868750075768857), (0.8124897773944226, -0.06501809184365866), (1.7785850509129835, -0.3232039212090548), (0.12476857901628965, 1.8034018852453007), (1.6782656706764094, 0.6717513651978019), (-1.3592134123208752, -1.1917904420589602), (-0.5176838135904852, -1.732001451258763), (-0.8530174494426137, 1.5937963448830177), (1.3346327069291273, -1.2192543194965846), (1.0643736896749056, 1.4611414054580332), (0.31297829783631154, 0.8012891756946366), (0.482264221007938, -1.742195964623858), (0.13801630947101606, -0.8033171783034576), (-0.769803364501423, -0.38395642722084267)]),
    17: (4.792033748310581, [(1.590453853286788, -1.032151407326854), (1.6712912122928538, 0.8953578451067926), (-1.21347052162858, 0.38707802108092065), (-0.8736733677731251, -0.5534207265161902), (-1.1352023454154747, -1.5186163511712902), (-1.2963092222692632, 1.383640989325358), (-0.3918410249784136, 0.9570999243744659), (0.8441340893078719, -1.697738974739629), (0.9173363368726208, -0.2926158712662641), (1.8943516563095182, -0.07944677034960168), (-0.05204387112295962, 0.01660117677735515), (0.9245697266939816, 1.6553098826390829), (-0.20471214471463234, -1.8849331353891399), (0.17101657289370487, -0.9582034386790392), (-1.8580677523473987, -0.37744432009010737), (0.6942758928559563, 0.6821887441901306), (-0.04616734438420832, 1.895454711512282)]),
    18: (4.863703305156275, [(1.9224520696667473, -0.19033877009931818), (-0.3527291248270323, -0.9357254749651509), (-0.7963878246022782, 1.7600617149390336), (0.19033877009931885, 1.922452069666747), (-1.1260642450644696, -1.5697229448397152), (0.3527291248270321, 0.9357254749651505), (-0.9867265947015963, -0.1623903547277135), (-1.7600617149390339, -0.7963878246022779), (1.5697229448397154, -1.1260642450644691), (0.9867265947015965, 0.16239035472771304), (-1.9224520696667473, 0.19033877009931857), (0.5829963501381185, -1.2884545997921826), (1.1260642450644696, 1.5697229448397154), (-0.6339974698745637, 0.7733351202374374), (1.7600617149390339, 0.7963878246022777), (-0.19033877009931852, -1.9224520696667473), (2.1725672375879543e-16, -2.809178932873155e-16), (-1.5697229448397154, 1.1260642450644693)]),
    19: (4.863703305156275, [(-0.5990491020778911, -1.8366248884485237), (-1.890088361658128, -0.39952070371055154), (-0.39952070371055093, 1.8900883616581279), (0.9985698057884419, -0.05346347320960378), (1.8366248884485235, -0.5990491020778909), (-1.4371041847379726, -1.291039259580237), (0.5455856288682869, 0.8380550826600819), (1.2910392595802367, -1.4371041847379733), (1.437104184737973, 1.291039259580237), (-8.804797120232384e-17, 1.898875314251144e-16), (-1.2910392595802371, 1.4371041847379726), (0.5990491020778912, 1.8366248884485235), (0.45298417692015525, -0.8915185558696858), (-0.5455856288682869, -0.838055082660082), (0.39952070371055076, -1.8900883616581277), (1.8900883616581279, 0.39952070371055076), (-0.45298417692015525, 0.8915185558696862), (-0.9985698057884419, 0.053463473209604144), (-1.8366248884485237, 0.5990491020778907)]),
    20: (5.122320736991529, [(-2.05849668778718, 0.10475424109222181), (-1.8655332902124482, -0.8764517144524928), (0.5120785991254507, -1.9965363941023748), (-0.10259079985816368, 2.0586056427694106), (-1.7669234649595535, 1.0613027530506656), (0.0986295039399038, 0.05406157600593656), (2.0378823075041295, 0.30889766172511285), (-0.9041875140584232, -0.6011077501627057), (-1.0242403166936953, 0.3916597576554223), (0.6073388199994969, -0.900013969672938), (1.0962209128685763, -0.02766409761932843), (-1.0594452133308134, 1.7680378685446825), (1.6526505897475607, 1.231717537775864), (-1.2334537157449017, -1.651355199759486), (-0.29658529226548014, 1.0776030245692205), (-0.27210793959087637, -1.3760112354696992), (1.9434296944992708, -0.68663169690604), (0.8784118183420263, 1.864611150362094), (1.3915253587158245, -1.520539128305613), (0.68441732593471, 0.8836085321619036)]),
}
