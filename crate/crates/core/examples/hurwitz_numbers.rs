//! Double Hurwitz numbers from the character formula, cross-checked by
//! enumerating permutation tuples.

use hurwitz_toda::hurwitz::{double_hurwitz_coeff, hurwitz_bruteforce, hurwitz_frobenius, hurwitz_table, RamificationProfile};
use hurwitz_toda::Partition;

fn main() -> hurwitz_toda::Result<()> {
    let full = Partition::row(3);
    let mixed = Partition::new(vec![2, 1])?;
    let profile = RamificationProfile::double(&full, &full, 2)?;
    println!("H((3), (3), 2 transpositions): brute force {}, Frobenius {}", hurwitz_bruteforce(&profile)?, hurwitz_frobenius(&profile)?);
    println!("coefficient for mu = (3), nu = (2,1), r = 0: {}", double_hurwitz_coeff(3, 0, &full, &mixed)?);

    let rows = hurwitz_table(3, 2, 6)?;
    println!("\n{:>2} {:>2} {:<8} {:<8} {:>10}  match", "d", "r", "mu", "nu", "H");
    for row in rows.iter().filter(|r| r.degree >= 2) {
        println!(
            "{:>2} {:>2} {:<8} {:<8} {:>10}  {}",
            row.degree,
            row.r,
            row.mu.to_string(),
            row.nu.to_string(),
            row.coefficient.to_string(),
            row.matches.unwrap_or(false)
        );
    }
    Ok(())
}
