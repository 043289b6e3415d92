//! `CGM1` binary format and CSV import.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! "CGM1" | mode u8 (0 radial, 1 grid3d) | f f64 | edh f64 | delta_d f64 | delta_h f64
//! | dims u32... (radial: n_range n_height; grid3d: n_x n_y n_height)
//! | provenance_len u32 | provenance utf-8 | loss_db f32 * cells
//! ```

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Deserialize;

use super::{ChannelGainMap, GridMode, GridSpec, MapMetadata};
use crate::error::{Error, Result};

pub const CGM_MAGIC: &[u8; 4] = b"CGM1";

pub fn write_cgm<W: Write>(map: &ChannelGainMap, mut w: W) -> Result<()> {
    let spec = map.spec();
    let meta = map.metadata();
    w.write_all(CGM_MAGIC)?;
    let mode = match spec.mode {
        GridMode::Radial { .. } => 0u8,
        GridMode::Grid3d { .. } => 1u8,
    };
    w.write_all(&[mode])?;
    for v in [meta.f, meta.edh, spec.delta_d, spec.delta_h] {
        w.write_all(&v.to_le_bytes())?;
    }
    let dims: Vec<usize> = match spec.mode {
        GridMode::Radial { n_range } => vec![n_range, spec.n_height],
        GridMode::Grid3d { n_x, n_y } => vec![n_x, n_y, spec.n_height],
    };
    for d in dims {
        let d = u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    let prov = meta.provenance.as_bytes();
    w.write_all(&(prov.len() as u32).to_le_bytes())?;
    w.write_all(prov)?;
    let mut payload = Vec::with_capacity(map.loss_db().len() * 4);
    for l in map.loss_db() {
        payload.extend_from_slice(&l.to_le_bytes());
    }
    w.write_all(&payload)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(buf)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array(r)?))
}

fn read_u32<R: Read>(r: &mut R) -> Result<usize> {
    Ok(u32::from_le_bytes(read_array(r)?) as usize)
}

pub fn read_cgm<R: Read>(mut r: R) -> Result<ChannelGainMap> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != CGM_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let [mode] = read_array::<1, _>(&mut r)?;
    let f = read_f64(&mut r)?;
    let edh = read_f64(&mut r)?;
    let delta_d = read_f64(&mut r)?;
    let delta_h = read_f64(&mut r)?;
    let spec = match mode {
        0 => {
            let n_range = read_u32(&mut r)?;
            let n_height = read_u32(&mut r)?;
            GridSpec::radial(delta_d, delta_h, n_range, n_height)
        }
        1 => {
            let n_x = read_u32(&mut r)?;
            let n_y = read_u32(&mut r)?;
            let n_height = read_u32(&mut r)?;
            GridSpec::grid3d(delta_d, delta_h, n_x, n_y, n_height)
        }
        m => return Err(Error::Format(format!("unknown grid mode {m}"))),
    };
    spec.validate()?;
    let prov_len = read_u32(&mut r)?;
    let mut prov = vec![0u8; prov_len];
    r.read_exact(&mut prov).map_err(|e| Error::Format(format!("truncated provenance: {e}")))?;
    let provenance = String::from_utf8(prov).map_err(|e| Error::Format(e.to_string()))?;

    let mut payload = vec![0u8; spec.cell_count() * 4];
    r.read_exact(&mut payload).map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let loss_db = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    ChannelGainMap::new(spec, loss_db, MapMetadata { f, edh, provenance })
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    r_m: Option<f64>,
    x_m: Option<f64>,
    y_m: Option<f64>,
    h_m: f64,
    loss_db: f64,
}

/// Imports a table of `(r_m | x_m,y_m), h_m, loss_db` samples, one per cell,
/// such as the output of an external propagation solver. The grid extent is
/// inferred from the samples; every cell must be covered.
pub fn read_csv<R: Read>(
    r: R,
    delta_d: f64,
    delta_h: f64,
    meta: MapMetadata,
) -> Result<ChannelGainMap> {
    let mut reader = csv::Reader::from_reader(r);
    let rows = reader.deserialize::<CsvRow>().collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Format("CSV contains no samples".into()));
    }
    let radial = rows[0].r_m.is_some();
    let idx = |v: f64, step: f64| -> Result<usize> {
        let t = (v / step).floor();
        if t < 0.0 || !t.is_finite() {
            return Err(Error::Format(format!("negative or invalid coordinate {v}")));
        }
        Ok(t as usize)
    };

    let mut cells: HashMap<(usize, usize, usize), f64> = HashMap::with_capacity(rows.len());
    let spec = if radial {
        let mut n_range = 0;
        let mut n_height = 0;
        for row in &rows {
            let rm = row.r_m.ok_or_else(|| Error::Format("missing r_m".into()))?;
            let (i, k) = (idx(rm, delta_d)?, idx(row.h_m, delta_h)?);
            n_range = n_range.max(i + 1);
            n_height = n_height.max(k + 1);
            cells.insert((i, 0, k), row.loss_db);
        }
        GridSpec::radial(delta_d, delta_h, n_range, n_height)
    } else {
        let coords = rows
            .iter()
            .map(|row| match (row.x_m, row.y_m) {
                (Some(x), Some(y)) => Ok((x, y)),
                _ => Err(Error::Format("need either r_m or x_m,y_m columns".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        // smallest symmetric half-width whose half-open cells contain every x
        let half = coords
            .iter()
            .map(|(x, _)| {
                let t = x.abs() / delta_d;
                if *x < 0.0 { t.ceil() as usize } else { t.floor() as usize + 1 }
            })
            .max()
            .unwrap_or(1);
        let n_x = 2 * half.max(1);
        let x0 = -(n_x as f64) * delta_d / 2.0;
        let mut n_y = 0;
        let mut n_height = 0;
        for (row, (x, y)) in rows.iter().zip(&coords) {
            let (i, j, k) = (idx(x - x0, delta_d)?, idx(*y, delta_d)?, idx(row.h_m, delta_h)?);
            n_y = n_y.max(j + 1);
            n_height = n_height.max(k + 1);
            cells.insert((i, j, k), row.loss_db);
        }
        GridSpec::grid3d(delta_d, delta_h, n_x, n_y, n_height)
    };
    spec.validate()?;
    if cells.len() != spec.cell_count() {
        return Err(Error::Format(format!(
            "CSV covers {} of {} grid cells",
            cells.len(),
            spec.cell_count()
        )));
    }
    let mut loss_db = vec![0f32; spec.cell_count()];
    for ((i, j, k), l) in cells {
        let cell = match spec.mode {
            GridMode::Radial { .. } => super::CellIndex::Radial { r: i, h: k },
            GridMode::Grid3d { .. } => super::CellIndex::Grid { x: i, y: j, h: k },
        };
        loss_db[spec.flat_index(cell)] = l as f32;
    }
    ChannelGainMap::new(spec, loss_db, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgm::{synthesize_duct_map, DuctModelParams};
    use crate::geom::Point3;

    fn meta() -> MapMetadata {
        MapMetadata { f: 10e9, edh: 35.0, provenance: "csv".into() }
    }

    #[test]
    fn binary_header_layout() {
        let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::radial(50.0, 1.0, 3, 2), 10e9).unwrap();
        let mut buf = Vec::new();
        write_cgm(&map, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"CGM1");
        assert_eq!(buf[4], 0);
        assert_eq!(f64::from_le_bytes(buf[5..13].try_into().unwrap()), 10e9);
        assert_eq!(f64::from_le_bytes(buf[21..29].try_into().unwrap()), 50.0);
        assert_eq!(f64::from_le_bytes(buf[29..37].try_into().unwrap()), 1.0);
        assert_eq!(u32::from_le_bytes(buf[37..41].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(buf[41..45].try_into().unwrap()), 2);
        let plen = u32::from_le_bytes(buf[45..49].try_into().unwrap()) as usize;
        assert_eq!(buf.len(), 49 + plen + 6 * 4);
        let first = f32::from_le_bytes(buf[49 + plen..53 + plen].try_into().unwrap());
        assert_eq!(first, map.loss_db()[0]);
    }

    #[test]
    fn grid3d_round_trip() {
        let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::grid3d(100.0, 2.0, 4, 3, 5), 10e9).unwrap();
        let mut buf = Vec::new();
        write_cgm(&map, &mut buf).unwrap();
        let back = read_cgm(buf.as_slice()).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn corrupt_inputs_rejected() {
        let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::radial(50.0, 1.0, 3, 2), 10e9).unwrap();
        let mut buf = Vec::new();
        write_cgm(&map, &mut buf).unwrap();
        assert!(read_cgm(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_cgm(extra.as_slice()).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_cgm(bad.as_slice()), Err(Error::Format(_))));
        let mut mode = buf;
        mode[4] = 7;
        assert!(read_cgm(mode.as_slice()).is_err());
    }

    #[test]
    fn csv_radial_import() {
        let csv = "r_m,h_m,loss_db\n25,0.5,100\n75,0.5,110\n25,1.5,101\n75,1.5,111\n";
        let map = read_csv(csv.as_bytes(), 50.0, 1.0, meta()).unwrap();
        assert_eq!(map.spec().mode, GridMode::Radial { n_range: 2 });
        assert_eq!(map.loss_at(Point3::new(60.0, 0.0, 1.2)).unwrap(), 111.0);
        assert_eq!(map.loss_at(Point3::new(0.0, 10.0, 0.2)).unwrap(), 100.0);
    }

    #[test]
    fn csv_grid_import() {
        let mut csv = String::from("x_m,y_m,h_m,loss_db\n");
        for (x, y) in [(-5.0, 5.0), (5.0, 5.0), (-5.0, 15.0), (5.0, 15.0)] {
            csv.push_str(&format!("{x},{y},0.5,{}\n", 100.0 + x + y));
        }
        let map = read_csv(csv.as_bytes(), 10.0, 1.0, meta()).unwrap();
        assert_eq!(map.spec().mode, GridMode::Grid3d { n_x: 2, n_y: 2 });
        assert_eq!(map.loss_at(Point3::new(3.0, 12.0, 0.1)).unwrap(), 120.0);
    }

    #[test]
    fn csv_incomplete_coverage_rejected() {
        let csv = "r_m,h_m,loss_db\n25,0.5,100\n125,0.5,110\n";
        assert!(read_csv(csv.as_bytes(), 50.0, 1.0, meta()).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn binary_round_trip_is_bit_exact(values in proptest::collection::vec(0.0f32..300.0, 12), prov in "[a-z ]{0,20}") {
            let spec = GridSpec::radial(50.0, 1.0, 4, 3);
            let map = ChannelGainMap::new(spec, values, MapMetadata { f: 9e9, edh: 12.5, provenance: prov }).unwrap();
            let mut buf = Vec::new();
            write_cgm(&map, &mut buf).unwrap();
            let back = read_cgm(buf.as_slice()).unwrap();
            let bits = |m: &ChannelGainMap| m.loss_db().iter().map(|l| l.to_bits()).collect::<Vec<_>>();
            proptest::prop_assert_eq!(bits(&back), bits(&map));
            proptest::prop_assert_eq!(back.metadata(), map.metadata());
        }
    }
}
