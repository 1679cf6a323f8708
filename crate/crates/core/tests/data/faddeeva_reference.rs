// Faddeeva reference values w(x + iy) computed at 40 significant digits.
const FADDEEVA_REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.0, 0.0, 1.0, 0.0),
    (0.0, 1.0, 0.42758357615580700441, 0.0),
    (1.0, 2.0, 0.21849261527489069682, 0.092997809392601866048),
    (0.5, 0.5, 0.53315670791217491377, 0.23048823138445840871),
    (3.0, 0.1, 0.0079426809987699907004, 0.20074234309867737198),
    (5.5, 0.01, 0.00019662559640924461611, 0.10436705873336245833),
    (6.2, 0.0001, 1.5290983527298724612e-6, 0.092231463734515976988),
    (-2.3, 0.7, 0.090585291806171583249, -0.23495227748036982444),
    (9.5, 9.5, 0.02977575113563773041, 0.029611259321537730336),
    (0.01, 7.0, 0.079799899208551860807, 0.00011178385157806476427),
    (-7.5, -0.3, -0.0030877814871104181425, -0.07578559870214387349),
    (2.0, -3.0, 250.34730620373907556, -159.18785104818723322),
    (0.2, -1.5, 14.728490130721979278, 10.326704076442782898),
    (1e-08, 1e-08, 0.99999998871620832904, 1.128379147095512748e-8),
    (4.0, 0.0, 1.1253517471925911451e-7, 0.14595358990015278327),
    (-8.0, 2.0, 0.016942003411131035393, -0.066752152418496954592),
    (0.0, 9.9, 0.056702456938832268241, 0.0),
    (7.0, 7.0, 0.040501640057114686944, 0.040090583461840794788),
    (0.3, 3.9, 0.13959815736960408231, 0.010129168053104500348),
    (-1.1, -0.9, -0.82667090545065331031, -1.4677538945320525826),
    (2.394288, -2.180402, -0.51898521587237760675, -0.51611824498934260354),
    (2.970047, -5.79227, -108599458051.63962845, 16512179151.440791544),
    (5.201314, 1.289683, 0.026658056920643966931, 0.10358647899501807794),
    (0.364702, 0.450976, 0.59174017707851512112, 0.18886742517128810907),
    (0.318955, 0.19713, 0.74783526190164680504, 0.24367842112176331957),
    (0.369475, -0.592846, 1.7140879758370541821, 1.2098192800517046226),
    (-2.984293, 3.019213, 0.096836382943086871273, -0.090598980272328228512),
    (1.136454, -0.491085, 0.00082335018133072147849, 0.98213909542131461469),
    (-6.096062, 1.485017, 0.0220762356012909168, -0.088241905865476660812),
    (5.349296, 2.165599, 0.038091671726943494434, 0.091184456875977788222),
    (3.39944, -9.151569, 3.6993175157549811397e+31, -2.5934248306696936599e+31),
    (8.537763, -0.896331, -0.0070042931607379893516, 0.065793481514303816834),
    (0.908256, -1.120724, -1.6879248937691603066, 2.9276112943454321162),
    (-2.05848, 2.297556, 0.14045590472385383258, -0.11383979166575602634),
    (0.604605, 1.703131, 0.27083368252762993917, 0.077415032309298534761),
    (6.151302, 1.726999, 0.024701931765880813181, 0.085761419844859320886),
    (2.28199, -4.97945, -476506367.75709914892, -430710652.45173811714),
    (0.526762, -0.278841, 0.95535671283569684613, 0.79894890658991272969),
    (5.884508, 3.415695, 0.042535890084763765792, 0.071681578001270462249),
    (0.99719, 2.979002, 0.16523412127108589886, 0.050655485825841697758),
    (4.524175, -0.263535, -0.0078433229878820944888, 0.12751050942339395111),
    (-1.54177, 7.792741, 0.069210682141263345, -0.013483814470618441862),
    (0.891588, 2.272308, 0.20632518251891605497, 0.070640120245757242377),
    (-4.420017, 2.83665, 0.059971108921891295223, -0.090027079896766331606),
    (7.248555, -0.817007, -0.0089147145390944540462, 0.077562390703818571283),
    (6.180874, -7.607304, 681076312.35450686928, -143888401.80024778027),
    (-1.860107, 3.744686, 0.11994589789792275095, -0.056480676591021267578),
    (1.051927, 1.096987, 0.2859608102526571842, 0.19548382722890607923),
    (-0.021427, 0.391487, 0.67565441269638482238, -0.012836277610199417633),
    (2.838078, 7.099449, 0.068251765695532329798, 0.026832634822171843111),
    (8.754636, 0.049907, 0.0003747987077037987728, 0.064871411424115923579),
    (1.939969, 6.676832, 0.077370993069032265286, 0.022035222436683593368),
    (4.592926, 3.54018, 0.060714037783125419823, 0.07643136597285327213),
    (-8.132734, 2.100769, 0.01713616380272963798, -0.065381917296357065583),
    (-0.171159, 4.737893, 0.11645057297427163217, -0.0040376229596713758125),
    (-0.124535, 0.593775, 0.56592409521684117001, -0.05578860407873293151),
    (-6.468068, 0.204127, 0.0028548499228343619989, -0.088215587960166014858),
    (8.152519, -1.045215, -0.0089257400958434734223, 0.068565852409885643341),
    (-0.218531, 3.85172, 0.14157738721844120428, -0.0075659642525971457468),
    (0.175193, 0.142183, 0.83564406351890809061, 0.15218277051577821264),
];
