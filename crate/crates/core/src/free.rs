//! Free Klein-Gordon flow: the multiplier matrix, exact grid evolution,
//! pointwise kernels, the light-cone Green function, the free resolvent, and
//! high-energy `B_j` operator samples.

use num_complex::Complex64;

use crate::cutoff::{smoothstep, Cutoff};
use crate::error::{KgError, Result};
use crate::fourier::{dft_forward, dft_inverse_unnormalized, dft_wavenumber};
use crate::grid::{GridSpec, KGState};
use crate::linalg::CMat;
use crate::par;
use crate::special::{bessel_j0, oscillatory_integral, QuadratureRule};

/// Mass parameter `m > 0` of the Klein-Gordon equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mass(f64);

impl Mass {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(KgError::Invalid(format!("mass m = {m} must be positive")));
        }
        Ok(Mass(m))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Dispersion relation `w(k) = sqrt(k^2 + m^2)`.
    pub fn omega(&self, k: f64) -> f64 {
        (k * k + self.0 * self.0).sqrt()
    }
}

/// Dense 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2 {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Matrix2 {
            a11: z,
            a12: z,
            a21: z,
            a22: z,
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.a11 = Complex64::new(1.0, 0.0);
        m.a22 = Complex64::new(1.0, 0.0);
        m
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn mul_vec(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.a11 * v.0 + self.a12 * v.1,
            self.a21 * v.0 + self.a22 * v.1,
        )
    }

    pub fn scale(&self, c: Complex64) -> Matrix2 {
        Matrix2 {
            a11: self.a11 * c,
            a12: self.a12 * c,
            a21: self.a21 * c,
            a22: self.a22 * c,
        }
    }

    pub fn add(&self, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a11: self.a11 + o.a11,
            a12: self.a12 + o.a12,
            a21: self.a21 + o.a21,
            a22: self.a22 + o.a22,
        }
    }

    pub fn sub(&self, o: &Matrix2) -> Matrix2 {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a11
            .norm()
            .max(self.a12.norm())
            .max(self.a21.norm())
            .max(self.a22.norm())
    }
}

/// The spectral multiplier of the free flow:
/// `[[cos(t w), sin(t w)/w], [-w sin(t w), cos(t w)]]`.
pub fn mt_matrix(k: f64, t: f64, m: &Mass) -> Matrix2 {
    let w = m.omega(k);
    let (s, c) = (t * w).sin_cos();
    Matrix2 {
        a11: Complex64::new(c, 0.0),
        a12: Complex64::new(s / w, 0.0),
        a21: Complex64::new(-w * s, 0.0),
        a22: Complex64::new(c, 0.0),
    }
}

/// Exact diagonalization of the discrete free flow: inverse DFT of
/// `M_t(k) * band(k^2+m^2)` applied to the forward DFT of the state.
pub fn evolve_free(state: &KGState, t: f64, m: &Mass, band: Option<&Cutoff>) -> KGState {
    let grid = *state.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let mut a: Vec<Complex64> = state.psi.values().to_vec();
    let mut b: Vec<Complex64> = state.psidot.values().to_vec();
    dft_forward(&mut a);
    dft_forward(&mut b);
    for i in 0..n {
        let k = dft_wavenumber(i, n, dx);
        let mt = mt_matrix(k, t, m);
        let mult = band.map_or(1.0, |c| c.eval_at_k(k, m.value()));
        let (u, v) = mt.mul_vec((a[i], b[i]));
        a[i] = u * mult;
        b[i] = v * mult;
    }
    dft_inverse_unnormalized(&mut a);
    dft_inverse_unnormalized(&mut b);
    let scale = Complex64::new(1.0 / n as f64, 0.0);
    let psi = crate::grid::GridFn::new(grid, a.into_iter().map(|z| z * scale).collect())
        .expect("evolution preserves length");
    let psidot = crate::grid::GridFn::new(grid, b.into_iter().map(|z| z * scale).collect())
        .expect("evolution preserves length");
    KGState { psi, psidot }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelEntry {
    E11,
    E12,
    E21,
    E22,
}

/// Smooth roll-off used to realize improper k-integrals of non-decaying
/// amplitudes: equals 1 for `|k| <= k_max/2` and falls to 0 at `k_max`.
fn high_k_taper(k: f64, k_max: f64) -> f64 {
    smoothstep(2.0 * (k_max - k.abs()) / k_max)
}

fn band_needs_taper(band: Option<&Cutoff>) -> bool {
    !matches!(band, Some(Cutoff::Band { .. }))
}

/// Pointwise kernel entry of `e^{-itK_0} band(K_0^2)` at `(x, y)`, computed by
/// oscillatory quadrature of `M_t(k) e^{i(y-x)k} band(k^2+m^2) / 2 pi` over
/// `[-k_max, k_max]`.
///
/// Without a band only the (1,2) entry is a function; the cos-entries are
/// distributions at fixed `t` and are rejected. Non-compact bands (none,
/// zeta, xi) are completed by an internal smooth roll-off on
/// `[k_max/2, k_max]`.
pub fn free_kernel(
    t: f64,
    x: f64,
    y: f64,
    m: &Mass,
    band: Option<&Cutoff>,
    entry: KernelEntry,
    k_max: f64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    if band.is_none() && entry != KernelEntry::E12 {
        return Err(KgError::DistributionalEntry);
    }
    let p = y - x;
    let mv = m.value();
    let taper = band_needs_taper(band);
    let weight = |k: f64| -> f64 {
        let b = band.map_or(1.0, |c| c.eval_at_k(k, mv));
        if taper {
            b * high_k_taper(k, k_max)
        } else {
            b
        }
    };
    // entry-specific amplitudes of the e^{+i t w} / e^{-i t w} parts
    let half_i = Complex64::new(0.0, 0.5); // 1/(2i) = -i/2
    let amp = |k: f64, sign: f64| -> Complex64 {
        let w = m.omega(k);
        let b = weight(k);
        match entry {
            KernelEntry::E11 | KernelEntry::E22 => Complex64::new(0.5 * b, 0.0),
            KernelEntry::E12 => -half_i.scale(sign) * b / w,
            KernelEntry::E21 => half_i.scale(sign) * b * w,
        }
    };
    let plus = oscillatory_integral(|k| amp(k, 1.0), -k_max, k_max, t, p, mv, rule)?;
    let minus = oscillatory_integral(|k| amp(k, -1.0), -k_max, k_max, -t, p, mv, rule)?;
    Ok((plus + minus) / (2.0 * std::f64::consts::PI))
}

/// All four kernel entries at once for a compact band (single node sweep).
pub fn free_kernel_matrix(
    t: f64,
    x: f64,
    y: f64,
    m: &Mass,
    band: &Cutoff,
    k_max: f64,
    rule: &QuadratureRule,
) -> Result<Matrix2> {
    let p = y - x;
    let rows = free_kernel_distance_rows(t, m, band, k_max, rule, &[p])?;
    Ok(rows[0])
}

/// Kernel entries for a batch of separations `d = y - x`, sharing one
/// quadrature sweep per distance. Used for dense operator assembly.
pub fn free_kernel_distance_rows(
    t: f64,
    m: &Mass,
    band: &Cutoff,
    k_max: f64,
    rule: &QuadratureRule,
    distances: &[f64],
) -> Result<Vec<Matrix2>> {
    let n = rule.n_nodes;
    let required = crate::special::required_nodes(t, k_max);
    if n < required {
        return Err(KgError::NodeCountTooLow { required, given: n });
    }
    let mv = m.value();
    let taper = band_needs_taper(Some(band));
    let h = 2.0 * k_max / (n - 1) as f64;
    // precompute per-node weights and phases
    let nodes: Vec<(f64, f64, f64)> = (0..n)
        .map(|i| {
            let k = -k_max + i as f64 * h;
            let mut b = band.eval_at_k(k, mv);
            if taper {
                b *= high_k_taper(k, k_max);
            }
            let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            (k, b * w, mv.hypot(k))
        })
        .collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    let out = par::map_range(distances.len(), |di| {
        let d = distances[di];
        let mut c_plus = Complex64::new(0.0, 0.0); // Int b e^{i(tw + kd)}
        let mut c_minus = Complex64::new(0.0, 0.0); // Int b e^{i(-tw + kd)}
        let mut s_plus = Complex64::new(0.0, 0.0); // same with 1/w weight
        let mut s_minus = Complex64::new(0.0, 0.0);
        let mut g_plus = Complex64::new(0.0, 0.0); // same with w weight
        let mut g_minus = Complex64::new(0.0, 0.0);
        for &(k, bw, w) in &nodes {
            if bw == 0.0 {
                continue;
            }
            let e_plus = Complex64::from_polar(bw, t * w + k * d);
            let e_minus = Complex64::from_polar(bw, -t * w + k * d);
            c_plus += e_plus;
            c_minus += e_minus;
            s_plus += e_plus / w;
            s_minus += e_minus / w;
            g_plus += e_plus * w;
            g_minus += e_minus * w;
        }
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, -0.5); // 1/(2i)
        Matrix2 {
            a11: half * (c_plus + c_minus) / two_pi,
            a12: half_i * (s_plus - s_minus) / two_pi,
            a21: -half_i * (g_plus - g_minus) / two_pi,
            a22: half * (c_plus + c_minus) / two_pi,
        }
    });
    Ok(out)
}

/// Light-cone Green function `U(t,r) = (1/2) theta(t-r) J_0(m sqrt(t^2-r^2))`.
/// On the cone `r = t` the Gibbs midpoint `1/4` is returned.
pub fn green_u(t: f64, r: f64, m: &Mass) -> f64 {
    debug_assert!(t > 0.0 && r >= 0.0);
    if (r - t).abs() <= 1e-14 * t.max(1.0) {
        return 0.25;
    }
    if r > t {
        return 0.0;
    }
    0.5 * bessel_j0(m.value() * (t * t - r * r).sqrt())
}

/// Free matrix resolvent kernel at spectral parameter `omega` off the
/// continuous spectrum, via the scalar resolvent
/// `R_0(z, x, y) = -e^{i sqrt(z) |x-y|} / (2 i sqrt(z))` with the branch
/// `Im sqrt >= 0`.
pub fn free_resolvent_kernel(omega: Complex64, x: f64, y: f64, m: &Mass) -> Result<Matrix2> {
    if omega.im == 0.0 && omega.re.abs() >= m.value() {
        return Err(KgError::OnContinuousSpectrum {
            re: omega.re,
            im: omega.im,
        });
    }
    let z = omega * omega - m.value() * m.value();
    let mut sq = z.sqrt();
    if sq.im < 0.0 {
        sq = -sq;
    }
    let i = Complex64::new(0.0, 1.0);
    let r0 = -(i * sq * (x - y).abs()).exp() / (2.0 * i * sq);
    let mut out = Matrix2::zero();
    out.a21 = -i;
    out.a11 += omega * r0;
    out.a12 += i * r0;
    out.a21 += -i * omega * omega * r0;
    out.a22 += omega * r0;
    Ok(out)
}

/// Dense sample (kernel values times dx) of the high-energy operator
/// `B_j(t)` with kernel
/// `Int e^{i w(k) t} e^{i k (x-y)} zeta(k^2+m^2) w^j(k) dk`, `j in {-1,0,1}`,
/// completed by the internal high-k roll-off on `[0.75 k_max, k_max]`.
pub fn bj_operator_matrix(
    j: i32,
    t: f64,
    m: &Mass,
    grid: &GridSpec,
    rule: &QuadratureRule,
) -> Result<CMat> {
    if !(-1..=1).contains(&j) {
        return Err(KgError::Invalid(format!("B_j index j = {j} not in -1..=1")));
    }
    let n = grid.n_points();
    let dx = grid.dx();
    let k_max = grid.k_max();
    let zeta = Cutoff::ZetaHigh { m: m.value() };
    let mv = m.value();
    let amp = move |k: f64| -> Complex64 {
        let w = mv.hypot(k);
        let roll = smoothstep(4.0 * (k_max - k.abs()) / k_max);
        Complex64::new(zeta.eval(k * k + mv * mv) * w.powi(j) * roll, 0.0)
    };
    // kernel depends on x - y only: evaluate on the 2N-1 distances
    let values = par::map_range(2 * n - 1, |di| {
        let d = (di as isize - (n as isize - 1)) as f64 * dx;
        oscillatory_integral(amp, -k_max, k_max, t, d, mv, rule)
    });
    let mut kernel = Vec::with_capacity(2 * n - 1);
    for v in values {
        kernel.push(v?);
    }
    let mat = CMat::from_fn(n, n, |i, l| {
        kernel[(i as isize - l as isize + n as isize - 1) as usize] * dx
    });
    Ok(mat)
}

/// Dense blocks of the banded free propagator, assembled from the
/// translation-invariant kernel (line dynamics, no periodic images).
/// Block order: [11, 12, 21, 22]; entries are kernel values times dx.
pub fn free_propagator_blocks(
    t: f64,
    m: &Mass,
    band: &Cutoff,
    grid: &GridSpec,
    rule: &QuadratureRule,
) -> Result<[CMat; 4]> {
    let n = grid.n_points();
    let dx = grid.dx();
    let distances: Vec<f64> = (0..2 * n - 1)
        .map(|di| (di as isize - (n as isize - 1)) as f64 * dx)
        .collect();
    let rows = free_kernel_distance_rows(t, m, band, grid.k_max(), rule, &distances)?;
    let pick = |sel: fn(&Matrix2) -> Complex64| {
        CMat::from_fn(n, n, |i, l| {
            // entry at (x_i, y_l) has separation d = y - x = (l - i) dx
            sel(&rows[(l as isize - i as isize + n as isize - 1) as usize]) * dx
        })
    };
    Ok([
        pick(|r| r.a11),
        pick(|r| r.a12),
        pick(|r| r.a21),
        pick(|r| r.a22),
    ])
}
