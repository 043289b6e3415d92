//! Link budget numbers: radio horizon and achievable rate with distance,
//! under free space and under the synthetic duct.

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::radio::{free_space_loss_db, los_range, shannon_rate_db};
use duct_planner::{Point3, RadioParams};

fn main() -> duct_planner::Result<()> {
    let radio = RadioParams::default();
    let horizon = los_range(radio.z_tx, radio.z_rx);
    println!("radio horizon for {} m / {} m antennas: {:.3} km", radio.z_tx, radio.z_rx, horizon / 1e3);

    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), radio.f)?;
    println!("{:>8} {:>14} {:>14}", "r_km", "free_Mbit/s", "duct_Mbit/s");
    for r_km in [1.0, 10.0, 25.0, 29.0, 50.0, 75.0, 100.0] {
        let r = r_km * 1e3;
        let free = if r <= horizon { shannon_rate_db(free_space_loss_db(r, radio.f)?, &radio) } else { 0.0 };
        let duct = shannon_rate_db(map.loss_at(Point3::new(r, 0.0, radio.z_tx))? as f64, &radio);
        println!("{r_km:>8.0} {:>14.2} {:>14.2}", free / 1e6, duct / 1e6);
    }
    Ok(())
}
