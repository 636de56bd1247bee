//! Bessel function of the first kind, order zero.
//!
//! Power series for `|x| <= 8`; for larger arguments the standard asymptotic
//! form `J0(x) = sqrt(2/(pi x)) [P(x) cos(x-pi/4) - Q(x) sin(x-pi/4)]` with
//! the fdlibm rational approximations of P and Q on `[8, inf)` (Sun
//! Microsystems coefficients, as in the FreeBSD/Go math libraries).

const INV_SQRT_PI: f64 = 5.641_895_835_477_562_8e-1;

// pzero coefficients on [8, inf): pzero(x) = 1 + z R(z)/S(z), z = 1/x^2
const PR8: [f64; 5] = [
    -7.031_249_999_999_003_6e-2,
    -8.081_670_412_753_498e0,
    -2.570_631_056_797_048_5e2,
    -2.485_216_410_094_288_2e3,
    -5.253_043_804_907_295_5e3,
];
const PS8: [f64; 5] = [
    1.165_343_646_196_681_8e2,
    3.833_744_753_641_218_3e3,
    4.059_785_726_484_725_5e4,
    1.167_529_725_643_759_2e5,
    4.762_772_841_467_309_6e4,
];

// qzero coefficients on [8, inf): qzero(x) = (-0.125 + z R(z)/S(z)) / x
const QR8: [f64; 5] = [
    7.324_218_749_999_350_5e-2,
    1.176_820_646_822_526_9e1,
    5.576_733_802_564_018_6e2,
    8.859_197_207_564_686e3,
    3.701_462_679_871_854_4e4,
];
const QS8: [f64; 6] = [
    1.637_760_268_956_898_2e2,
    8.098_344_946_564_498e3,
    1.425_382_914_191_204_8e5,
    8.033_092_571_195_144e5,
    8.405_015_798_190_605e5,
    -3.438_992_935_378_666e5,
];

fn pzero(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    let r = z * (PR8[0] + z * (PR8[1] + z * (PR8[2] + z * (PR8[3] + z * PR8[4]))));
    let s = 1.0 + z * (PS8[0] + z * (PS8[1] + z * (PS8[2] + z * (PS8[3] + z * PS8[4]))));
    1.0 + r / s
}

fn qzero(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    let r = z * (QR8[0] + z * (QR8[1] + z * (QR8[2] + z * (QR8[3] + z * QR8[4]))));
    let s = 1.0
        + z * (QS8[0] + z * (QS8[1] + z * (QS8[2] + z * (QS8[3] + z * (QS8[4] + z * QS8[5])))));
    (-0.125 + r / s) / x
}

/// Power series `sum (-1)^m (x^2/4)^m / (m!)^2`; accurate to ~1e-13 absolute
/// for `|x| <= 10`, used below the crossover and as the small-x oracle.
pub(crate) fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * mf);
        sum += term;
        if term.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

/// `J_0(x)`; absolute error below 1e-12 for `|x| <= 50`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 8.0 {
        return j0_series(x);
    }
    let s = x.sin();
    let c = x.cos();
    let mut ss = s - c;
    let mut cc = s + c;
    // cc*ss = -cos(2x); rewrite the more cancellation-prone factor
    let z = -(2.0 * x).cos();
    if s * c < 0.0 {
        cc = z / ss;
    } else {
        ss = z / cc;
    }
    INV_SQRT_PI * (pzero(x) * cc - qzero(x) * ss) / x.sqrt()
}
