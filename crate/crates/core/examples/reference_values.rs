//! Prints the closed-form outage probabilities at the reference configuration.

use wpnoma::analytic::*;
use wpnoma::model::SystemParams;

fn main() -> wpnoma::Result<()> {
    let p = SystemParams::default();
    println!("FPA user 1      {:.6e}", fpa_outage_user1(&p)?.value);
    println!("FPA user 2      {:.6e}", fpa_outage_user2(&p)?.value);
    println!("DPA user 1      {:.6e}", dpa_outage_user1(&p, DEFAULT_CHEBYSHEV_ORDER)?.value);
    println!("DPA user 2      {:.6e}", dpa_outage_user2(&p)?.value);
    println!("floor user 1    {:.6e}", fpa_floor(&p, 1)?);
    println!("floor user 2    {:.6e}", fpa_floor(&p, 2)?);
    for order in [5, 10, 20, 40, 80] {
        println!("Upsilon_II J={order:<3} {:.10e}", upsilon_ii_chebyshev(&p, order)?);
    }
    println!("Upsilon_II direct {:.10e}", upsilon_ii_direct(&p)?);
    Ok(())
}
