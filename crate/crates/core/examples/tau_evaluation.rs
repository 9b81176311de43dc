//! Truncated single-sector tau function: values, analytic derivatives and
//! the truncation tail bound as the degree D grows.

use hurwitz_toda::poly::rat;
use hurwitz_toda::tau::{Deriv, Tau, TauKind, TauPoint, TauSpec};

fn main() -> hurwitz_toda::Result<()> {
    let point = TauPoint::single(rat(1, 3), vec![rat(1, 10), rat(1, 20)], rat(1, 2));
    for d in [4, 6, 8, 10] {
        let tau = Tau::new(TauSpec::new(d, rat(1, 5), rat(1, 10)))?;
        let z = tau.eval(TauKind::Z, &point, &Deriv::none())?;
        let tail = z.tail_bound.map_or("diverges".to_string(), |b| b.to_sci_string(3));
        println!("D = {d:>2}: Z = {}  tail <= {tail}  ({} terms)", z.value.to_sci_string(30), z.terms);
    }

    let tau = Tau::new(TauSpec::new(8, rat(1, 5), rat(1, 10)))?;
    for (label, deriv) in [
        ("dZ/ds", Deriv::s(1)),
        ("dZ/dt1", Deriv::t(1, 1)),
        ("d2Z/dt1 dt2", Deriv::t(1, 1).and_t(2, 1)),
        ("dZ/dtb1", Deriv::tbar1(1)),
    ] {
        let v = tau.eval(TauKind::Z, &point, &deriv)?;
        println!("{label:<12} = {}", v.value.to_sci_string(25));
    }

    let report = tau.check_linear_s_tbar1(&point, &hurwitz_toda::Real::from_int(10, tau.prec()).powi(-30))?;
    println!("\n{}: {:?}", report.id, report.verdict);
    Ok(())
}
