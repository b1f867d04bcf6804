//! Closed-form ground state of the unit-interval cell problem: minimize
//! ∫|χ'|² + (ĝ/2)∫χ⁴ over unit-norm χ on [0,1] with χ(0) = χ(1) = 0.
//!
//! The minimizer is a Jacobi elliptic sine, so the whole one-parameter family
//! reduces to complete elliptic integrals.  Three regimes keep full floating
//! precision: a small-parameter series (m ≤ 0.5) that forms K−E and
//! (2+m)K − 2(1+m)E termwise to dodge cancellation, the AGM in the
//! complementary parameter t = 1−m for moderate coupling, and a
//! hyperbolic-tangent plateau for ĝ > 2000 where t < 1.1e-13 and the two
//! wall layers no longer see each other (matching error ~e^{-2b}).

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Complete elliptic integrals (K, E) by the arithmetic-geometric mean,
/// parametrized by t = 1 − m so that m near 1 keeps full precision.
fn agm_ke(t: f64) -> (f64, f64) {
    debug_assert!(t > 0.0 && t <= 1.0);
    let mut a = 1.0f64;
    let mut b = t.sqrt();
    let mut sum = 0.5 * (1.0 - t); // accumulates 2^{n-1} c_n^2; c_0^2 = m
    let mut pw = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() < f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pw *= 2.0;
        sum += pw * c * c;
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// K, K−E, and (2+m)K − 2(1+m)E by series in m, valid for m ≤ 0.5.
/// Coefficients come from a_k = [(2k−1)!!/(2k)!!]²; the combinations are
/// summed termwise because both differences vanish at m = 0 (as m and m²).
fn series_k_kme_delta(m: f64) -> (f64, f64, f64) {
    debug_assert!((0.0..=0.5 + 1e-9).contains(&m));
    let mut a_prev = 1.0f64; // a_{k-1}
    let mut mk = 1.0f64; // m^k
    let mut k_sum = 1.0f64;
    let mut kme_sum = 0.0f64;
    let mut delta_sum = 0.0f64;
    for k in 1..=80usize {
        let kf = k as f64;
        let r = (2.0 * kf - 1.0) / (2.0 * kf);
        let a_k = a_prev * r * r;
        mk *= m;
        k_sum += a_k * mk;
        kme_sum += a_k * mk * (2.0 * kf) / (2.0 * kf - 1.0);
        if k >= 2 {
            let c = 4.0 * kf * a_k / (2.0 * kf - 1.0)
                + (2.0 * kf - 1.0) * a_prev / (2.0 * kf - 3.0);
            delta_sum += c * mk;
        }
        a_prev = a_k;
        if k >= 6 && a_k * mk < 1e-18 * k_sum {
            break;
        }
    }
    (0.5 * PI * k_sum, 0.5 * PI * kme_sum, 0.5 * PI * delta_sum)
}

/// Jacobi sn(u | m) via the AGM and the descending amplitude recurrence.
pub fn jacobi_sn(u: f64, m: f64) -> f64 {
    if m < 1e-14 {
        return u.sin();
    }
    if m > 1.0 - 1e-14 {
        return u.tanh();
    }
    let mut a = vec![1.0f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while *c.last().unwrap() > f64::EPSILON * a.last().unwrap() {
        let (an, bn) = (0.5 * (a.last().unwrap() + b), (a.last().unwrap() * b).sqrt());
        c.push(0.5 * (a.last().unwrap() - b));
        a.push(an);
        b = bn;
        if a.len() > 60 {
            break;
        }
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        let s = (c[i] / a[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    phi.sin()
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// ĝ = 0: χ = √2 sin(πz)
    Sine,
    /// elliptic sine of parameter m and quarter period K, amplitude `amp`
    Elliptic { m: f64, big_k: f64, amp: f64 },
    /// plateau of density `rho` with wall layers of inverse width `b`
    Tanh { rho: f64, b: f64 },
}

/// Exact ground state of the unit cell problem at coupling ĝ.
#[derive(Debug, Clone, Copy)]
pub struct UnitGp {
    pub g_hat: f64,
    /// chemical potential μ̂(ĝ)
    pub mu_hat: f64,
    /// minimal energy ê(ĝ); satisfies μ̂ = ê + (ĝ/2) q̂ exactly
    pub e_hat: f64,
    /// quartic integral q̂ = ∫χ⁴
    pub q_hat: f64,
    shape: Shape,
}

struct Branch {
    m: f64,
    g: f64,
    mu: f64,
    q: f64,
    amp: f64,
    big_k: f64,
}

fn branch_from_m_series(m: f64) -> Branch {
    let (k, kme, delta) = series_k_kme_delta(m);
    Branch {
        m,
        g: 8.0 * k * kme,
        mu: 4.0 * k * k * (1.0 + m),
        q: if m == 0.0 { 1.5 } else { k * delta / (3.0 * kme * kme) },
        amp: if m == 0.0 { std::f64::consts::SQRT_2 } else { (m * k / kme).sqrt() },
        big_k: k,
    }
}

fn branch_from_t_agm(t: f64) -> Branch {
    let m = 1.0 - t;
    let (k, e) = agm_ke(t);
    let kme = k - e;
    let delta = (2.0 + m) * k - 2.0 * (1.0 + m) * e;
    Branch {
        m,
        g: 8.0 * k * kme,
        mu: 4.0 * k * k * (1.0 + m),
        q: k * delta / (3.0 * kme * kme),
        amp: (m * k / kme).sqrt(),
        big_k: k,
    }
}

/// ĝ at the series/AGM seam (parameter m = 0.5).
fn seam_g() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| branch_from_m_series(0.5).g)
}

/// μ̂ at the series/AGM seam.
fn seam_mu_low() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| branch_from_m_series(0.5).mu)
}

/// μ̂ at the AGM/tanh seam ĝ = 2000.
fn seam_mu_high() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| UnitGp::solve(2000.0).expect("seam coupling is valid").mu_hat)
}

const G_TANH_SEAM: f64 = 2000.0;

/// Plateau density from the normalization ρ(1 − (2/b)tanh(b/2)) = 1 with
/// b = √(ĝρ/2); fixed point contracts like 1/b.
fn tanh_rho(g: f64) -> f64 {
    let mut rho = 1.0 + 2.0 * (2.0 / g).sqrt();
    for _ in 0..200 {
        let b = (g * rho / 2.0).sqrt();
        let next = 1.0 / (1.0 - (2.0 / b) * (0.5 * b).tanh());
        let done = (next - rho).abs() <= 1e-15 * rho;
        rho = next;
        if done {
            break;
        }
    }
    rho
}

fn tanh_quartic(rho: f64, b: f64) -> f64 {
    let th = (0.5 * b).tanh();
    2.0 * rho * rho * (0.5 - (th + th * th * th / 3.0) / b)
}

impl UnitGp {
    pub fn solve(g_hat: f64) -> Result<UnitGp> {
        if !g_hat.is_finite() || g_hat < 0.0 {
            return Err(Error::domain(format!(
                "cell coupling must be finite and nonnegative, got {g_hat}"
            )));
        }
        if g_hat == 0.0 {
            return Ok(UnitGp {
                g_hat,
                mu_hat: PI * PI,
                e_hat: PI * PI,
                q_hat: 1.5,
                shape: Shape::Sine,
            });
        }
        let br = if g_hat <= seam_g() {
            let (mut lo, mut hi) = (0.0f64, 0.5f64);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if branch_from_m_series(mid).g < g_hat {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            branch_from_m_series(0.5 * (lo + hi))
        } else if g_hat <= G_TANH_SEAM {
            // ĝ decreases in t; bisect on ln t
            let (mut lo, mut hi) = ((1e-16f64).ln(), (0.5f64).ln());
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if branch_from_t_agm(mid.exp()).g > g_hat {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            branch_from_t_agm((0.5 * (lo + hi)).exp())
        } else {
            let rho = tanh_rho(g_hat);
            let b = (g_hat * rho / 2.0).sqrt();
            let mu = g_hat * rho;
            let q = tanh_quartic(rho, b);
            return Ok(UnitGp {
                g_hat,
                mu_hat: mu,
                e_hat: mu - 0.5 * g_hat * q,
                q_hat: q,
                shape: Shape::Tanh { rho, b },
            });
        };
        Ok(UnitGp {
            g_hat,
            mu_hat: br.mu,
            e_hat: br.mu - 0.5 * g_hat * br.q,
            q_hat: br.q,
            shape: Shape::Elliptic { m: br.m, big_k: br.big_k, amp: br.amp },
        })
    }

    /// dê/dĝ = q̂/2 (envelope identity).
    pub fn de_dg(&self) -> f64 {
        0.5 * self.q_hat
    }

    /// χ(z) for z ∈ [0,1]; zero outside.
    pub fn profile(&self, z: f64) -> f64 {
        if !(0.0..=1.0).contains(&z) {
            return 0.0;
        }
        match self.shape {
            Shape::Sine => std::f64::consts::SQRT_2 * (PI * z).sin(),
            Shape::Elliptic { m, big_k, amp } => {
                let zz = z.min(1.0 - z); // sn(2K − u) = sn(u)
                amp * jacobi_sn(2.0 * big_k * zz, m)
            }
            Shape::Tanh { rho, b } => rho.sqrt() * (b * z).tanh() * (b * (1.0 - z)).tanh(),
        }
    }
}

/// Inverse of ĝ ↦ μ̂(ĝ): the cell coupling whose ground state has chemical
/// potential `mu_hat`.  Errors below the wall-only level π².
pub fn g_hat_for_mu(mu_hat: f64) -> Result<f64> {
    let floor = PI * PI;
    if !mu_hat.is_finite() || mu_hat < floor * (1.0 - 1e-12) {
        return Err(Error::domain(format!(
            "cell chemical potential {mu_hat} is below the wall-only level {floor}"
        )));
    }
    if mu_hat <= floor {
        return Ok(0.0);
    }
    if mu_hat <= seam_mu_low() {
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if branch_from_m_series(mid).mu < mu_hat {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(branch_from_m_series(0.5 * (lo + hi)).g)
    } else if mu_hat <= seam_mu_high() {
        let (mut lo, mut hi) = ((1e-16f64).ln(), (0.5f64).ln());
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if branch_from_t_agm(mid.exp()).mu > mu_hat {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(branch_from_t_agm((0.5 * (lo + hi)).exp()).g)
    } else {
        // plateau regime inverts in closed form
        let b = (mu_hat / 2.0).sqrt();
        let rho = 1.0 / (1.0 - (2.0 / b) * (0.5 * b).tanh());
        Ok(mu_hat / rho)
    }
}
