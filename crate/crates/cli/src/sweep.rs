//! One- and two-axis parameter sweeps over circuit and geometry keys.

use rayon::prelude::*;
use triad_core::circuit::squeezed_coupling;
use triad_core::constants::ordinary;
use triad_core::{CouplingSet, FluxResult};

use crate::config::{AxisConfig, CircuitConfig, Config, GeometryConfig, Record, SweepKey};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::run::{couplings_from_circuit, resolve_flux, Manifest, RunContext, Written};

/// Sets `key` to `value` on copies of the circuit and geometry sections. The
/// squeeze parameter lives outside both and is written through `r`.
fn apply(key: SweepKey, value: f64, circuit: &mut CircuitConfig, geometry: &mut GeometryConfig, r: &mut f64) {
    match key {
        SweepKey::PhiExtRatio => circuit.phi_ext_ratio = Some(value),
        SweepKey::Asymmetry => circuit.asymmetry = Some(value),
        SweepKey::ESoMhz => circuit.e_so_mhz = Some(value),
        SweepKey::EcMhz => circuit.e_c_mhz = Some(value),
        SweepKey::EjSumGhz => circuit.e_j_sum_ghz = Some(value),
        SweepKey::EjOverEc => circuit.e_j_sum_ghz = Some(value * circuit.e_c_mhz.unwrap_or(200.0) / 1e3),
        SweepKey::RadiusUm => geometry.radius_um = Some(value),
        SweepKey::HalfSideUm => geometry.half_side_um = Some(value),
        SweepKey::OffsetUm => geometry.offset_um = Some(value),
        SweepKey::SqueezeR => *r = value,
    }
}

struct Point {
    values: Vec<f64>,
}

fn record_value(rec: Record, c: &CouplingSet, flux: &FluxResult, r: f64) -> f64 {
    let mhz = |v: f64| ordinary(v) / 1e6;
    match rec {
        Record::OmegaMMhz => mhz(c.omega_m),
        Record::OmegaAMhz => mhz(c.omega_a),
        Record::OmegaSMhz => mhz(c.omega_s),
        Record::GMhz => mhz(c.g),
        Record::JMhz => mhz(c.j),
        Record::G1Mhz => mhz(c.g1),
        Record::G2Mhz => mhz(c.g2),
        Record::G2BarMhz => mhz(c.g2_bar),
        Record::G3Mhz => mhz(c.g3),
        Record::G3BarMhz => mhz(c.g3_bar),
        Record::PhiYigWb => flux.phi,
        Record::FluxRatio => flux.flux_ratio(),
        Record::GEffMhz => mhz(squeezed_coupling(c.g, r)),
        Record::JEffMhz => mhz(squeezed_coupling(c.j, r)),
        Record::GEffOverG => squeezed_coupling(c.g, r) / c.g,
    }
}

/// Evaluates every sweep point in parallel; row order follows the sweep order
/// (the primary key varies fastest). Failing points keep their row with the
/// message in the `error` column.
pub fn sweep_table(cfg: &Config) -> CliResult<(Table, Option<FluxResult>)> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::config("sweep", "section required for this command"))?;
    let axes: Vec<AxisConfig> = sweep.second.iter().cloned().chain(std::iter::once(sweep.primary())).collect();
    let mut points = vec![Point { values: Vec::new() }];
    for axis in &axes {
        let pts = axis.points();
        points = points.into_iter().flat_map(|p| pts.iter().map(move |&v| Point { values: [p.values.clone(), vec![v]].concat() })).collect();
    }
    let geometry_swept = axes.iter().any(|a| a.key.touches_geometry());
    let shared_flux = if geometry_swept { None } else { Some(resolve_flux(&cfg.geometry)?.1) };
    let records = sweep.records();

    let mut columns: Vec<String> = vec![sweep.key.column().to_string()];
    if let Some(s) = &sweep.second {
        columns.push(s.key.column().to_string());
    }
    columns.extend(records.iter().map(|r| r.column().to_string()));
    columns.push("error".into());

    let base_circuit = cfg.circuit.clone().unwrap_or_default();
    let base_geometry = cfg.geometry.clone().unwrap_or_default();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|p| {
            let mut circuit = base_circuit.clone();
            let mut geometry = base_geometry.clone();
            let mut r = 0.0;
            for (axis, &v) in axes.iter().zip(&p.values) {
                apply(axis.key, v, &mut circuit, &mut geometry, &mut r);
            }
            let result = (|| -> CliResult<Vec<f64>> {
                let flux = match &shared_flux {
                    Some(f) => f.clone(),
                    None => resolve_flux(&Some(geometry.clone()))?.1,
                };
                let (_, c, _) = couplings_from_circuit(&circuit, flux.phi)?;
                Ok(records.iter().map(|&rec| record_value(rec, &c, &flux, r)).collect())
            })();
            // Output order: primary key first, then the slow key.
            let mut row: Vec<Cell> = vec![p.values[p.values.len() - 1].into()];
            if p.values.len() == 2 {
                row.push(p.values[0].into());
            }
            match result {
                Ok(vals) => {
                    row.extend(vals.into_iter().map(Cell::from));
                    row.push(Cell::Empty);
                }
                Err(e) => {
                    row.extend(records.iter().map(|_| Cell::Empty));
                    row.push(e.to_string().into());
                }
            }
            row
        })
        .collect();
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row);
    }
    Ok((table, shared_flux))
}

pub fn run_sweep(ctx: &RunContext, cfg: &Config) -> CliResult<Written> {
    let (table, flux) = sweep_table(cfg)?;
    let failures = table.rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Empty))).count();
    let mut manifest = Manifest::new(ctx, cfg);
    manifest.flux = flux;
    if failures > 0 {
        manifest.warnings.push(format!("{failures} of {} sweep points failed; see the error column", table.rows.len()));
    }
    let mut w = Written::default();
    let p = table.save(&ctx.out_dir, "sweep", ctx.format)?;
    manifest.add_output(&p);
    w.files.push(p);
    w.files.push(manifest.save(&ctx.out_dir)?);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    fn column(t: &Table, name: &str) -> Vec<f64> {
        t.column(name).unwrap().into_iter().map(|v| v.unwrap()).collect()
    }

    #[test]
    fn flux_sweep_has_zeros_and_one_peak_per_half_period() {
        let cfg = parse(
            "schema_version = 1\n[circuit]\nasymmetry = 0.1\n[sweep]\nkey = \"phi_ext_ratio\"\nstart = 0.0\nstop = 1.0\nstep = 0.01\nrecord = [\"g_mhz\"]\n",
        )
        .unwrap();
        let (t, _) = sweep_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 101);
        let g = column(&t, "g_mhz");
        for k in [0, 50, 100] {
            assert_eq!(g[k], 0.0);
        }
        for half in [&g[0..=50], &g[50..=100]] {
            let mag: Vec<f64> = half.iter().map(|v| v.abs()).collect();
            let peaks = (1..mag.len() - 1).filter(|&i| mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]).count();
            assert_eq!(peaks, 1);
        }
    }

    #[test]
    fn radius_sweep_flux_increases() {
        let cfg =
            parse("schema_version = 1\n[circuit]\n[sweep]\nkey = \"radius_um\"\nstart = 10.0\nstop = 50.0\nstep = 10.0\nrecord = [\"phi_yig_wb\"]\n")
                .unwrap();
        let (t, shared) = sweep_table(&cfg).unwrap();
        assert!(shared.is_none());
        let phi: Vec<f64> = column(&t, "phi_yig_wb").iter().map(|v| v.abs()).collect();
        assert!(phi.windows(2).all(|w| w[1] > w[0]), "{phi:?}");
    }

    #[test]
    fn squeeze_sweep_scales_by_cosh() {
        let cfg =
            parse("schema_version = 1\n[circuit]\n[sweep]\nkey = \"squeeze_r\"\nstart = 0.0\nstop = 2.0\nstep = 0.25\nrecord = [\"g_eff_over_g\"]\n")
                .unwrap();
        let (t, _) = sweep_table(&cfg).unwrap();
        for row in &t.rows {
            let r = row[0].as_f64().unwrap();
            assert!((row[1].as_f64().unwrap() - r.cosh()).abs() < 1e-14);
        }
    }

    #[test]
    fn failing_points_keep_their_rows() {
        // Small E_J/E_C leaves the transmon regime.
        let cfg =
            parse("schema_version = 1\n[circuit]\n[sweep]\nkey = \"e_j_over_e_c\"\nstart = 1.0\nstop = 50.0\nstep = 7.0\nrecord = [\"g_mhz\"]\n")
                .unwrap();
        let (t, _) = sweep_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 8);
        assert!(matches!(&t.rows[0][2], Cell::Text(m) if !m.is_empty()));
        assert!(matches!(t.rows[7][2], Cell::Empty));
        assert!(t.rows[7][1].as_f64().is_some());
    }

    #[test]
    fn two_axis_order_is_primary_fastest() {
        let cfg = parse(
            "schema_version = 1\n[circuit]\n[sweep]\nkey = \"phi_ext_ratio\"\nstart = 0.1\nstop = 0.3\nstep = 0.1\nrecord = [\"g_mhz\"]\n[sweep.second]\nkey = \"asymmetry\"\nstart = 0.2\nstop = 0.3\nstep = 0.1\n",
        )
        .unwrap();
        let (t, _) = sweep_table(&cfg).unwrap();
        assert_eq!(t.columns[..2], ["phi_ext_ratio".to_string(), "asymmetry".to_string()]);
        let phi = column(&t, "phi_ext_ratio");
        let a = column(&t, "asymmetry");
        assert_eq!(phi.len(), 6);
        assert!((phi[1] - 0.2).abs() < 1e-12 && (a[1] - 0.2).abs() < 1e-12 && (a[3] - 0.3).abs() < 1e-12);
    }
}
