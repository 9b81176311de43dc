//! Baker-Akhiezer function, dressing coefficients, the Lax operator and the
//! reduced logarithmic operator at one sample point.

use std::sync::Arc;

use hurwitz_toda::dressing::{BAPoint, Dressing};
use hurwitz_toda::poly::rat;
use hurwitz_toda::tau::{Tau, TauSpec};

fn main() -> hurwitz_toda::Result<()> {
    let tau = Arc::new(Tau::new(TauSpec::new(8, rat(1, 5), rat(1, 10)))?);
    let point = BAPoint::new(rat(1, 3), vec![rat(1, 10), rat(1, 20)], rat(1, 2), rat(2, 1));
    let dressing = Dressing::new(tau, point)?;

    println!("Psi = {}", dressing.eval_psi()?.to_sci_string(30));
    for (n, w) in dressing.w_coeffs(4)?.iter().enumerate() {
        println!("w_{n} = {}", w.to_sci_string(20));
    }
    let prec = dressing.prec();
    let c = dressing.coeff_functions(0, 0, 0)?;
    for (name, g) in [("ubar0", &c.ubar0), ("u1", &c.u1), ("v", &c.v), ("phi", &c.phi)] {
        println!("{name:<6}= {}", g.value_at(0, prec).expect("sampled").to_sci_string(20));
    }

    let tail = dressing.psi_tail()?.map_or("diverges".into(), |t| t.to_sci_string(3));
    println!("relative tail of Psi <= {tail}\n");
    let reports = [
        dressing.check_ba_linear(1, None)?,
        dressing.check_log_eigen(None)?,
        dressing.check_exp_identity(20, None)?,
        dressing.check_fkl_lax(1, None)?,
        dressing.check_toda_field(None)?,
    ];
    for r in &reports {
        let worst = r.measurements.iter().map(|m| m.residual.to_f64()).fold(0.0, f64::max);
        println!("{:<16} {:?}  worst residual {worst:.2e}", r.id, r.verdict);
    }
    Ok(())
}
