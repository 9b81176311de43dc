//! Initial-value dressing operators at t = 0 and the exact identities they
//! satisfy, followed by the numeric operator-exponential string equations.

use hurwitz_toda::poly::rat;
use hurwitz_toda::stringeq::{
    build_initial_dressing, check_canonical_commutation, check_gstreq_on_testfuncs, check_log_string_equations,
    check_route_equality, initial_operators, GstreqParams,
};

fn main() -> hurwitz_toda::Result<()> {
    let data = build_initial_dressing(1, 4)?;
    let ops = initial_operators(&data);
    println!("W0      = {}", data.w0);
    println!("log L0  = {}", ops.log_l);
    println!("log Lb0 = {}", ops.log_lbar);
    println!("M0      = {}", ops.m);

    let data = build_initial_dressing(2, 8)?;
    for r in [check_route_equality(2, 8)?, check_canonical_commutation(&data), check_log_string_equations(&data)] {
        println!("\n{}: {:?}", r.id, r.verdict);
        for e in &r.exact {
            println!("  {:<50} nonzero terms {:>3}  passed {}", e.name, e.nonzero_terms, e.passed);
        }
    }

    let mut params = GstreqParams::new(rat(1, 5), rat(1, 10), vec![rat(-1, 2)]);
    params.s_points = vec![rat(1, 3)];
    let r = check_gstreq_on_testfuncs(&build_initial_dressing(1, 12)?, &params)?;
    println!("\n{}: {:?}", r.id, r.verdict);
    for m in &r.measurements {
        println!("  {:<40} {}", m.name, m.residual.to_sci_string(3));
    }
    Ok(())
}
