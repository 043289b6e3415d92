//! Builds the synthetic duct map, compares it with free space along the
//! duct and round-trips it through the binary file format.
//!
//! ```text
//! cargo run --release --example synthesize_map -- [edh_m]
//! ```

use duct_planner::cgm::{read_cgm, synthesize_duct_map, write_cgm, DuctModelParams, GridSpec};
use duct_planner::radio::free_space_loss_db;
use duct_planner::Point3;

fn main() -> duct_planner::Result<()> {
    let edh = std::env::args().nth(1).map(|s| s.parse().expect("numeric duct height")).unwrap_or(35.0);
    let params = DuctModelParams { edh, ..DuctModelParams::default() };
    let map = synthesize_duct_map(&params, GridSpec::default(), 10e9)?;
    let (lo, hi) = map.min_max_loss();
    println!("{} cells, loss {lo:.1}..{hi:.1} dB, duct height {edh} m", map.spec().cell_count());

    println!("{:>8} {:>10} {:>10} {:>10}", "r_km", "fspl_dB", "h=10m", "h=60m");
    for r_km in [5.0, 20.0, 40.0, 60.0, 80.0, 100.0, 140.0] {
        let r = r_km * 1e3;
        let low = map.loss_at(Point3::new(r, 0.0, 10.0))?;
        let high = map.loss_at(Point3::new(r, 0.0, 60.0))?;
        println!("{r_km:>8.0} {:>10.1} {low:>10.1} {high:>10.1}", free_space_loss_db(r, 10e9)?);
    }

    let mut bytes = Vec::new();
    write_cgm(&map, &mut bytes)?;
    let back = read_cgm(bytes.as_slice())?;
    println!("file size {} bytes, identical after reading back: {}", bytes.len(), back.loss_db() == map.loss_db());
    Ok(())
}
