use crate::integrands::IntegrandSpec;
use crate::model::GradMat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdCheck {
    pub grad_err: f64,
    pub hess_err: f64,
}

/// Max-norm gap between analytic derivatives and central differences with step `h`.
/// Shape errors surface as infinite discrepancies.
pub fn fd_check(f: &IntegrandSpec, z: &GradMat, h: f64) -> FdCheck {
    let (Ok(g), Ok(hess)) = (f.gradient(z), f.hessian(z)) else {
        return FdCheck {
            grad_err: f64::INFINITY,
            hess_err: f64::INFINITY,
        };
    };
    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    for k in 0..z.len() {
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp.as_mut_slice()[k] += h;
        zm.as_mut_slice()[k] -= h;
        let (fp, gp) = f.eval_grad(&zp).expect("shape checked");
        let (fm, gm) = f.eval_grad(&zm).expect("shape checked");
        grad_err = grad_err.max((g.as_slice()[k] - (fp - fm) / (2.0 * h)).abs());
        for j in 0..z.len() {
            let d = (gp.as_slice()[j] - gm.as_slice()[j]) / (2.0 * h);
            hess_err = hess_err.max((hess[(j, k)] - d).abs());
        }
    }
    FdCheck { grad_err, hess_err }
}
