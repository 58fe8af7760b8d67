//! Bell-pair costs of parity states, chained states and redundancy
//! resources.

use plqc::resources::{chain_cost_type_ii, parity_cost, redundancy_resource_cost};

fn main() -> plqc::Result<()> {
    let (five, tree) = parity_cost(5)?;
    println!("|0>^(5) by type-I joins: {five} Bell pairs");
    print!("{}", tree.to_text());
    for n in 2..=8 {
        println!("parity n={n}: {}", parity_cost(n)?.0);
    }
    println!("\n{}", chain_cost_type_ii(12, 5)?);
    println!("\n{}", redundancy_resource_cost(3, 3)?);
    Ok(())
}
