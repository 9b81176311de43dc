//! Schur polynomials in the times t_k: Jacobi-Trudi determinants, the
//! power-sum expansion and the special value at t = (c, 0, 0, ...).

use hurwitz_toda::partitions::enumerate_partitions;
use hurwitz_toda::poly::rat;
use hurwitz_toda::schur::{eval_special_c, from_power_sums, schur_in_power_sums, schur_poly};
use hurwitz_toda::Partition;

fn main() {
    for lambda in enumerate_partitions(3) {
        println!("S_{lambda} = {}", schur_poly(&lambda, 3));
    }

    let lambda = Partition::new(vec![2, 1, 1]).unwrap();
    let expansion = schur_in_power_sums(&lambda);
    println!("\ns_{lambda} in power sums:");
    for (mu, coeff) in &expansion {
        println!("  p_{mu}: {coeff}");
    }
    assert_eq!(from_power_sums(&expansion, 4), schur_poly(&lambda, 4));

    let c = rat(3, 2);
    println!("\nspecial values at t = ({c}, 0, ...):");
    for lambda in enumerate_partitions(4) {
        let mut at = vec![rat(0, 1); 4];
        at[0] = c.clone();
        let direct = schur_poly(&lambda, 4).eval(&at);
        let closed = eval_special_c(&lambda, &c);
        println!("  {lambda:<10} {direct:>8}  closed form {closed:>8}");
        assert_eq!(direct, closed);
    }
}
