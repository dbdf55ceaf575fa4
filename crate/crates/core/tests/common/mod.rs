//! Reference values shared by the integration tests, computed with 40-digit
//! arithmetic.

#![allow(clippy::excessive_precision)]

#![allow(dead_code)]

/// `(u, Psi(u))` on 50 equispaced points of `[-8, 8]`.
pub const PSI: [(f64, f64); 50] = [
    (-8.00000000000000000e+00, 9.99999999999999334e-01),
    (-7.67346938775510168e+00, 9.99999999999991673e-01),
    (-7.34693877551020424e+00, 9.99999999999898637e-01),
    (-7.02040816326530592e+00, 9.99999999998893885e-01),
    (-6.69387755102040849e+00, 9.99999999989133359e-01),
    (-6.36734693877551017e+00, 9.99999999903837145e-01),
    (-6.04081632653061185e+00, 9.99999999233317727e-01),
    (-5.71428571428571441e+00, 9.99999994491711397e-01),
    (-5.38775510204081609e+00, 9.99999964328413760e-01),
    (-5.06122448979591866e+00, 9.99999791713812813e-01),
    (-4.73469387755102034e+00, 9.99998903070144718e-01),
    (-4.40816326530612201e+00, 9.99994787452586631e-01),
    (-4.08163265306122458e+00, 9.99977639779397021e-01),
    (-3.75510204081632670e+00, 9.99913364564484208e-01),
    (-3.42857142857142838e+00, 9.99696616577182007e-01),
    (-3.10204081632653050e+00, 9.99039042714826242e-01),
    (-2.77551020408163263e+00, 9.97244241511135665e-01),
    (-2.44897959183673475e+00, 9.92836921746042211e-01),
    (-2.12244897959183687e+00, 9.83099973583532072e-01),
    (-1.79591836734693877e+00, 9.63746249579209069e-01),
    (-1.46938775510204089e+00, 9.29136176675954384e-01),
    (-1.14285714285714279e+00, 8.73451045526442260e-01),
    (-8.16326530612244916e-01, 7.92843297833331739e-01),
    (-4.89795918367346927e-01, 6.87860840366436022e-01),
    (-1.63265306122448967e-01, 5.64845225476833135e-01),
    (1.63265306122448967e-01, 4.35154774523166810e-01),
    (4.89795918367346927e-01, 3.12139159633563978e-01),
    (8.16326530612244916e-01, 2.07156702166668288e-01),
    (1.14285714285714279e+00, 1.26548954473557768e-01),
    (1.46938775510204089e+00, 7.08638233240456439e-02),
    (1.79591836734693877e+00, 3.62537504207908895e-02),
    (2.12244897959183687e+00, 1.69000264164679802e-02),
    (2.44897959183673475e+00, 7.16307825395775134e-03),
    (2.77551020408163263e+00, 2.75575848886428941e-03),
    (3.10204081632653050e+00, 9.60957285173768085e-04),
    (3.42857142857142838e+00, 3.03383422818031840e-04),
    (3.75510204081632670e+00, 8.66354355157636705e-05),
    (4.08163265306122458e+00, 2.23602206029416785e-05),
    (4.40816326530612201e+00, 5.21254741337051805e-06),
    (4.73469387755102034e+00, 1.09692985522798762e-06),
    (5.06122448979591866e+00, 2.08286187160894974e-07),
    (5.38775510204081609e+00, 3.56715862602864985e-08),
    (5.71428571428571441e+00, 5.50828854851972117e-09),
    (6.04081632653061185e+00, 7.66682255020642394e-10),
    (6.36734693877551017e+00, 9.61629074355229600e-11),
    (6.69387755102040849e+00, 1.08666648126293362e-11),
    (7.02040816326530592e+00, 1.10610514978147452e-12),
    (7.34693877551020424e+00, 1.01398850407046630e-13),
    (7.67346938775510168e+00, 8.37027494165236474e-15),
    (8.00000000000000000e+00, 6.22096057427178387e-16),
];

/// `(x, Gamma(x))` for `x = k / 8`, `k = 1..=80`.
pub const GAMMA: [(f64, f64); 80] = [
    (1.25000000000000000e-01, 7.53394159879761194e+00),
    (2.50000000000000000e-01, 3.62560990822190821e+00),
    (3.75000000000000000e-01, 2.37043618441660087e+00),
    (5.00000000000000000e-01, 1.77245385090551610e+00),
    (6.25000000000000000e-01, 1.43451884809055685e+00),
    (7.50000000000000000e-01, 1.22541670246517764e+00),
    (8.75000000000000000e-01, 1.08965235742289690e+00),
    (1.00000000000000000e+00, 1.00000000000000000e+00),
    (1.12500000000000000e+00, 9.41742699849701492e-01),
    (1.25000000000000000e+00, 9.06402477055477052e-01),
    (1.37500000000000000e+00, 8.88913569156225325e-01),
    (1.50000000000000000e+00, 8.86226925452758052e-01),
    (1.62500000000000000e+00, 8.96574280056598005e-01),
    (1.75000000000000000e+00, 9.19062526848883232e-01),
    (1.87500000000000000e+00, 9.53445812745034815e-01),
    (2.00000000000000000e+00, 1.00000000000000000e+00),
    (2.12500000000000000e+00, 1.05946053733091428e+00),
    (2.25000000000000000e+00, 1.13300309631934626e+00),
    (2.37500000000000000e+00, 1.22225615758980988e+00),
    (2.50000000000000000e+00, 1.32934038817913702e+00),
    (2.62500000000000000e+00, 1.45693320509197166e+00),
    (2.75000000000000000e+00, 1.60835942198554571e+00),
    (2.87500000000000000e+00, 1.78771089889694035e+00),
    (3.00000000000000000e+00, 2.00000000000000000e+00),
    (3.12500000000000000e+00, 2.25135364182819275e+00),
    (3.25000000000000000e+00, 2.54925696671852942e+00),
    (3.37500000000000000e+00, 2.90285837427579851e+00),
    (3.50000000000000000e+00, 3.32335097044784256e+00),
    (3.62500000000000000e+00, 3.82444966336642578e+00),
    (3.75000000000000000e+00, 4.42298841046025082e+00),
    (3.87500000000000000e+00, 5.13966883432870336e+00),
    (4.00000000000000000e+00, 6.00000000000000000e+00),
    (4.12500000000000000e+00, 7.03548013071310230e+00),
    (4.25000000000000000e+00, 8.28508514183521960e+00),
    (4.37500000000000000e+00, 9.79714701318081893e+00),
    (4.50000000000000000e+00, 1.16317283965674481e+01),
    (4.62500000000000000e+00, 1.38636300297032928e+01),
    (4.75000000000000000e+00, 1.65862065392259410e+01),
    (4.87500000000000000e+00, 1.99162167330237274e+01),
    (5.00000000000000000e+00, 2.40000000000000000e+01),
    (5.12500000000000000e+00, 2.90213555391915463e+01),
    (5.25000000000000000e+00, 3.52116118527996846e+01),
    (5.37500000000000000e+00, 4.28625181826660864e+01),
    (5.50000000000000000e+00, 5.23427777845535189e+01),
    (5.62500000000000000e+00, 6.41192888873777349e+01),
    (5.75000000000000000e+00, 7.87844810613232198e+01),
    (5.87500000000000000e+00, 9.70915565734906636e+01),
    (6.00000000000000000e+00, 1.20000000000000000e+02),
    (6.12500000000000000e+00, 1.48734447138356671e+02),
    (6.25000000000000000e+00, 1.84860962227198343e+02),
    (6.37500000000000000e+00, 2.30386035231830220e+02),
    (6.50000000000000000e+00, 2.87885277815044333e+02),
    (6.62500000000000000e+00, 3.60670999991499741e+02),
    (6.75000000000000000e+00, 4.53010766102608500e+02),
    (6.87500000000000000e+00, 5.70412894869257684e+02),
    (7.00000000000000000e+00, 7.20000000000000000e+02),
    (7.12500000000000000e+00, 9.10998488722434558e+02),
    (7.25000000000000000e+00, 1.15538101391998975e+03),
    (7.37500000000000000e+00, 1.46871097460291753e+03),
    (7.50000000000000000e+00, 1.87125430579778845e+03),
    (7.62500000000000000e+00, 2.38944537494368569e+03),
    (7.75000000000000000e+00, 3.05782267119260723e+03),
    (7.87500000000000000e+00, 3.92158865222614622e+03),
    (8.00000000000000000e+00, 5.04000000000000000e+03),
    (8.12500000000000000e+00, 6.49086423214734623e+03),
    (8.25000000000000000e+00, 8.37651235091992567e+03),
    (8.37500000000000000e+00, 1.08317434376965175e+04),
    (8.50000000000000000e+00, 1.40344072934834130e+04),
    (8.62500000000000000e+00, 1.82195209839456038e+04),
    (8.75000000000000000e+00, 2.36981257017427051e+04),
    (8.87500000000000000e+00, 3.08825106362809020e+04),
    (9.00000000000000000e+00, 4.03200000000000000e+04),
    (9.12500000000000000e+00, 5.27382718861971880e+04),
    (9.25000000000000000e+00, 6.91062268950893776e+04),
    (9.37500000000000000e+00, 9.07158512907083350e+04),
    (9.50000000000000000e+00, 1.19292461994609010e+05),
    (9.62500000000000000e+00, 1.57143368486530846e+05),
    (9.75000000000000000e+00, 2.07358599890248675e+05),
    (9.87500000000000000e+00, 2.74082281896992994e+05),
    (1.00000000000000000e+01, 3.62880000000000000e+05),
];
