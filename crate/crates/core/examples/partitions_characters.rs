//! Partitions of small degrees with their dimensions, kappa statistics and
//! the character table of S_4.

use hurwitz_toda::partitions::{character_table, enumerate_partitions, partition_count};

fn main() {
    for d in 0..=6 {
        println!("p({d}) = {}", partition_count(d));
    }

    println!("\npartitions of 5:");
    for lambda in enumerate_partitions(5) {
        println!(
            "  {lambda:<12} dim = {:>2}  kappa = {:>3}  conjugate = {}",
            lambda.dim(),
            lambda.kappa(),
            lambda.conjugate()
        );
    }

    println!("\ncharacter table of S_4 (rows lambda, columns mu):");
    let classes = enumerate_partitions(4);
    let table = character_table(4);
    for lambda in &classes {
        let row: Vec<String> = classes
            .iter()
            .map(|mu| {
                let chi = table.iter().find(|(l, m, _)| l == lambda && m == mu).expect("full table").2;
                format!("{chi:>3}")
            })
            .collect();
        println!("  {lambda:<10}{}", row.join(""));
    }
}
