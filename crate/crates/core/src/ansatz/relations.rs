use super::AnsatzBundle;
use crate::error::Result;
use crate::params::Frame;
use crate::spectral::SpectralField2D;

/// Pointwise residual of one defining relation on the continuum grid.
#[derive(Debug, Clone)]
pub struct RelationResidual {
    pub name: &'static str,
    pub values: Vec<f64>,
    pub sup: f64,
}

impl RelationResidual {
    fn new(name: &'static str, values: Vec<f64>) -> Self {
        let sup = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Self { name, values, sup }
    }
}

/// `f(ξ+dx, η+dy) - f + ε c ∂ξg - ε³ ∂τg`: the shape shared by every transport relation.
fn transport(f: &SpectralField2D, dx: f64, dy: f64, g: &SpectralField2D, gt: &SpectralField2D, eps: f64, c: f64) -> SpectralField2D {
    (&f.shift(dx, dy) - f).axpy(eps * c, &g.derivative(1, 0)).axpy(-eps.powi(3), gt)
}

/// Residuals of the relations that define the expansion fields. Horizontal: `WxR`, `Ut`.
/// Diagonal: `Ueq`, `Deq`, `Beq`, `Eeq`, `Feq`. Each is formally `O(ε⁵)`.
pub fn defining_relation_residuals(b: &AnsatzBundle) -> Result<Vec<RelationResidual>> {
    let eps = b.eps;
    let e2 = eps * eps;
    let c = b.speed();
    let p = &b.params;
    let f = |n: &str| b.get(n);
    let ft = |n: &str| b.get_tau(n);
    match b.frame {
        Frame::Horizontal => {
            let (w, a, u) = (f("W")?, f("A")?, f("U")?);
            Ok(vec![
                RelationResidual::new("WxR", transport(w, eps, 0.0, a, ft("A")?, eps, c).into_values()),
                RelationResidual::new("Ut", transport(w, 0.0, e2, u, ft("U")?, eps, c).into_values()),
            ])
        }
        Frame::Diagonal => {
            let (l, d, x, y, u, v) = (f("L")?, f("D")?, f("X")?, f("Y")?, f("U")?, f("V")?);
            let (lt, dt, xt, yt) = (ft("L")?, ft("D")?, ft("X")?, ft("Y")?);
            let ueq = transport(u, eps, 0.0, &(l + x), &(lt + xt), eps, c);
            let deq = transport(u, 0.0, e2, &(l + y), &(lt + yt), eps, c);
            let beq = transport(u, eps, e2, &(l + d), &(lt + dt), eps, c);

            let c2 = p.c1 * p.c1;
            let a2 = 2.0 * p.alpha1 * e2;
            let (dm, xm, ym) = (d.shift(-eps, -e2), x.shift(-eps, 0.0), y.shift(0.0, -e2));
            let lhs_u = u.derivative(1, 0).scale(-eps * c).axpy(eps.powi(3), ft("U")?);
            let lin_e = lhs_u.axpy(-c2, &(&(&(l - &dm) - &xm) - &ym));
            let eeq = pointwise(&lin_e, &[l, &dm, &xm, &ym], |lin, q| {
                lin - a2 * (q[0] * q[0] - q[1] * q[1] - q[2] * q[2] + q[3] * q[3])
            });

            let lhs_v = v.derivative(1, 0).scale(-eps * c).axpy(eps.powi(3), ft("V")?);
            let lin_f = lhs_v.axpy(-c2, &(&(&(d - l) + x) + y));
            let feq = pointwise(&lin_f, &[d, l, x, y], |lin, q| {
                lin - a2 * (q[0] * q[0] - q[1] * q[1] + q[2] * q[2] - q[3] * q[3])
            });

            Ok(vec![
                RelationResidual::new("Ueq", ueq.into_values()),
                RelationResidual::new("Deq", deq.into_values()),
                RelationResidual::new("Beq", beq.into_values()),
                RelationResidual::new("Eeq", eeq),
                RelationResidual::new("Feq", feq),
            ])
        }
    }
}

fn pointwise(lin: &SpectralField2D, fields: &[&SpectralField2D; 4], op: impl Fn(f64, [f64; 4]) -> f64) -> Vec<f64> {
    (0..lin.values().len())
        .map(|i| op(lin.values()[i], [0, 1, 2, 3].map(|k| fields[k].values()[i])))
        .collect()
}
