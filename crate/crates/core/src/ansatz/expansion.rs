use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{ik_pow, SpectralField2D};

/// `coef · ∂ξ^dxi ∂η^deta`; a negative `dxi` is a repeated `∂ξ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub dxi: i32,
    pub deta: u32,
}

pub const fn term(coef: f64, dxi: i32, deta: u32) -> Term {
    Term { coef, dxi, deta }
}

/// A field of the form `Σ terms(A) + Σ terms(∂τA)`.
///
/// Its τ-derivative is the same expansion applied to `(∂τA, ∂τ²A)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expansion {
    pub on_a: Vec<Term>,
    pub on_at: Vec<Term>,
}

fn symbol(terms: &[Term], kx: f64, ky: f64) -> Complex64 {
    terms
        .iter()
        .filter(|t| t.coef != 0.0 && !(kx == 0.0 && t.dxi < 0))
        .map(|t| t.coef * ik_pow(kx, t.dxi) * ik_pow(ky, t.deta as i32))
        .sum()
}

impl Expansion {
    pub fn new(on_a: Vec<Term>, on_at: Vec<Term>) -> Self {
        Self { on_a, on_at }
    }

    /// Field value from `A` and `∂τA`.
    pub fn eval(&self, a: &SpectralField2D, at: &SpectralField2D) -> Result<SpectralField2D> {
        if self.on_a.iter().any(|t| t.dxi < 0) {
            a.check_zero_mean()?;
        }
        if self.on_at.iter().any(|t| t.dxi < 0) {
            at.check_zero_mean()?;
        }
        let g = a.grid();
        let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
        for j in 0..g.ny {
            let ky = g.ky(j);
            for i in 0..g.nx {
                let kx = g.kx(i);
                let idx = i + g.nx * j;
                c[idx] = symbol(&self.on_a, kx, ky) * a.coeffs()[idx] + symbol(&self.on_at, kx, ky) * at.coeffs()[idx];
            }
        }
        SpectralField2D::from_coeffs(g, c)
    }

    /// τ-derivative from `∂τA` and `∂τ²A`.
    pub fn eval_tau(&self, at: &SpectralField2D, att: &SpectralField2D) -> Result<SpectralField2D> {
        self.eval(at, att)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &[Term]| v.iter().map(|t| term(s * t.coef, t.dxi, t.deta)).collect();
        Self { on_a: sc(&self.on_a), on_at: sc(&self.on_at) }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.on_a.extend_from_slice(&o.on_a);
        r.on_at.extend_from_slice(&o.on_at);
        r
    }

    /// `∂ξ` of the expansion.
    pub fn dxi(&self) -> Self {
        let d = |v: &[Term]| v.iter().map(|t| term(t.coef, t.dxi + 1, t.deta)).collect();
        Self { on_a: d(&self.on_a), on_at: d(&self.on_at) }
    }

    /// `∂τ` expressed through the next τ-derivative: terms on `A` move onto `∂τA`.
    /// Only valid for expansions with no `∂τA` terms.
    pub fn dtau(&self) -> Option<Self> {
        self.on_at.is_empty().then(|| Self { on_a: Vec::new(), on_at: self.on_a.clone() })
    }

    /// Collapses equal derivative pairs and drops zero coefficients.
    pub fn simplified(&self) -> Self {
        fn merge(v: &[Term]) -> Vec<Term> {
            let mut out: Vec<Term> = Vec::new();
            for t in v {
                match out.iter_mut().find(|o| o.dxi == t.dxi && o.deta == t.deta) {
                    Some(o) => o.coef += t.coef,
                    None => out.push(*t),
                }
            }
            out.retain(|t| t.coef != 0.0);
            out.sort_by_key(|t| (t.deta, t.dxi));
            out
        }
        Self { on_a: merge(&self.on_a), on_at: merge(&self.on_at) }
    }
}

/// `W_ε = -c A + ε (c/2) ∂ξA + ε² (∂ξ⁻¹∂τA - (c/12) ∂ξ²A) - ε³ (1/2) ∂τA`.
/// With `c = c1*` this is the diagonal `U_ε`.
pub fn w_expansion(c: f64, eps: f64) -> Expansion {
    let e2 = eps * eps;
    Expansion::new(
        vec![term(-c, 0, 0), term(eps * c / 2.0, 1, 0), term(-e2 * c / 12.0, 2, 0)],
        vec![term(e2, -1, 0), term(-e2 * eps / 2.0, 0, 0)],
    )
}

/// `U_ε = ε ∂ξ⁻¹∂ηA - ε² (1/2) ∂ηA + ε³ ((1/2) ∂ξ⁻¹∂η²A + (1/12) ∂ξ∂ηA)`.
/// The diagonal `Y_ε + L_ε` has the same form.
pub fn u_expansion(eps: f64) -> Expansion {
    let (e2, e3) = (eps * eps, eps * eps * eps);
    Expansion::new(
        vec![term(eps, -1, 1), term(-e2 / 2.0, 0, 1), term(e3 / 2.0, -1, 2), term(e3 / 12.0, 1, 1)],
        vec![],
    )
}

/// Diagonal `L_ε`.
pub fn l_expansion(eps: f64) -> Expansion {
    let e3 = eps * eps * eps;
    Expansion::new(
        vec![
            term(0.5, 0, 0),
            term(eps / 2.0, -1, 1),
            term(-eps / 8.0, 1, 0),
            term(e3 / 8.0, -1, 2),
            term(e3 / 384.0, 3, 0),
            term(-e3 / 48.0, 1, 1),
        ],
        vec![],
    )
}

/// Diagonal `X_ε = A - L_ε`.
pub fn x_expansion(eps: f64) -> Expansion {
    Expansion::new(vec![term(1.0, 0, 0)], vec![]).plus(&l_expansion(eps).scaled(-1.0)).simplified()
}

/// Diagonal `Y_ε`.
pub fn y_expansion(eps: f64) -> Expansion {
    let (e2, e3) = (eps * eps, eps * eps * eps);
    Expansion::new(
        vec![
            term(-0.5, 0, 0),
            term(eps / 2.0, -1, 1),
            term(eps / 8.0, 1, 0),
            term(-e2 / 2.0, 0, 1),
            term(3.0 * e3 / 8.0, -1, 2),
            term(-e3 / 384.0, 3, 0),
            term(5.0 * e3 / 48.0, 1, 1),
        ],
        vec![],
    )
}

/// Diagonal `D_ε`.
pub fn d_expansion(eps: f64) -> Expansion {
    let (e2, e3) = (eps * eps, eps * eps * eps);
    Expansion::new(
        vec![
            term(0.5, 0, 0),
            term(eps / 2.0, -1, 1),
            term(eps / 8.0, 1, 0),
            term(e2 / 2.0, 0, 1),
            term(3.0 * e3 / 8.0, -1, 2),
            term(-e3 / 384.0, 3, 0),
            term(5.0 * e3 / 48.0, 1, 1),
        ],
        vec![],
    )
}

/// Diagonal `V_ε = U_ε - ε c* ∂ξL_ε + ε³ ∂τL_ε`.
pub fn v_expansion(c_star: f64, eps: f64) -> Expansion {
    let l = l_expansion(eps);
    w_expansion(c_star, eps)
        .plus(&l.dxi().scaled(-eps * c_star))
        .plus(&l.dtau().expect("L has no τ terms").scaled(eps.powi(3)))
        .simplified()
}
