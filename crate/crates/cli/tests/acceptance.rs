//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails at the
//! end if any criterion failed.
//!
//! Run with `cargo test -p triad-cli --release --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use triad_cli::config::{parse, Config, DissipationConfig};
use triad_cli::run::{resolve_couplings, simulate, Simulation};
use triad_cli::scenarios;
use triad_cli::Table;
use triad_core::constants::ordinary;
use triad_core::dynamics::RunMetadata;
use triad_core::entanglement::pearson;
use triad_core::hilbert::{basis_state, build_operators};
use triad_core::{
    concurrence, evolve, log_negativity, partial_trace, populations, von_neumann_entropy, Bipartition, CMatrix, CVector, DensityMatrix,
    DephasingConvention, DissipationRates, EvolveOptions, LindbladModel, SpaceSpec, State, Subsystem, TimeGrid,
};

const COLLAPSE_WINDOW: (f64, f64) = (5.0, 20.0);

#[derive(Default)]
struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn mhz(v: f64) -> f64 {
    ordinary(v) / 1e6
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.column(name).unwrap_or_else(|| panic!("missing column {name}")).into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn window(gt: &[f64], v: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    gt.iter().zip(v).filter(|(g, _)| **g >= lo && **g <= hi).map(|(_, x)| *x).collect()
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn circuit_config(extra: &str) -> Config {
    parse(&format!("schema_version = 1\n[circuit]\n{extra}\n[geometry]\nradius_um = 30.0\noffset_um = 0.0\n")).unwrap()
}

fn run(name: &str, cfg: &Config) -> (Simulation, f64) {
    let start = Instant::now();
    let sim = simulate(cfg, false).unwrap_or_else(|e| panic!("{name}: {e}"));
    (sim, start.elapsed().as_secs_f64())
}

fn invariants_line(r: &mut Report, name: &str, m: &RunMetadata) {
    let inv = m.invariants;
    let ok = inv.max_trace_error < 1e-8 && inv.max_hermiticity_error < 1e-9 && inv.min_eigenvalue > -1e-8;
    r.check(
        &format!("11 invariants {name}"),
        ok,
        format!(
            "trace {:.2e} (<1e-8), hermiticity {:.2e} (<1e-9), min eigenvalue {:.2e} (>-1e-8), pure propagation {}",
            inv.max_trace_error, inv.max_hermiticity_error, inv.min_eigenvalue, m.pure_state_propagation
        ),
    );
}

fn couplings(r: &mut Report) {
    let start = Instant::now();
    let cfg = circuit_config("e_so_mhz = 600.0\ne_c_mhz = 200.0\ne_j_sum_ghz = 10.0\nasymmetry = 0.3\nphi_ext_ratio = 0.35");
    let g = mhz(resolve_couplings(&cfg).unwrap().couplings.g);
    let secs = start.elapsed().as_secs_f64();
    r.check("1 coupling golden value", (1.05..=1.95).contains(&g.abs()), format!("|G|/2pi = {:.4} MHz (window [1.05, 1.95])", g.abs()));
    r.check("1 runtime", secs < 1.0, format!("{secs:.3} s (< 1 s)"));

    let zeros: Vec<f64> = [0.0, 0.5, 1.0]
        .iter()
        .map(|phi| resolve_couplings(&circuit_config(&format!("asymmetry = 0.3\nphi_ext_ratio = {phi}"))).unwrap().couplings.g)
        .collect();
    r.check("2 zero-coupling points", zeros.iter().all(|&g| g == 0.0), format!("G at phi = 0, 0.5, 1: {zeros:?}"));

    let c = resolve_couplings(&circuit_config("asymmetry = 0.1\nphi_ext_ratio = 0.48")).unwrap().couplings;
    let (g1, j) = (mhz(c.g1), mhz(c.j));
    r.check("3a g1 golden value", (-1.5..=-0.9).contains(&g1), format!("g1/2pi = {g1:.4} MHz (window [-1.5, -0.9])"));
    let rel = (j + g1).abs() / g1.abs();
    r.check("3b J opposite to g1", rel < 0.1, format!("|J + g1|/|g1| = {rel:.4} (< 0.1), J/2pi = {j:.4} MHz"));
}

fn rabi(r: &mut Report) {
    let mut cfg = scenarios::load("fig2c_joint_excitation").unwrap();
    cfg.dissipation = DissipationConfig::default();
    cfg.overlay = None;
    let t = cfg.time.as_mut().unwrap();
    t.end = PI / 2.0;
    t.samples = 2;
    let (closed, _) = run("closed Rabi", &cfg);
    let p = *col(&closed.tables.populations, "P_1_dn_e").last().unwrap();
    r.check("4a closed transfer", p >= 1.0 - 1e-6, format!("P(1,dn,e) at Gt = pi/2: 1 - {:.2e} (>= 1 - 1e-6)", 1.0 - p));

    let cfg = scenarios::load("fig2c_joint_excitation").unwrap();
    let (sim, secs) = run("fig2c", &cfg);
    let gt = col(&sim.tables.populations, "Gt");
    let pe = col(&sim.tables.populations, "P_1_dn_e");
    let (k, peak) = pe.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    r.check("4b dissipative peak", peak > 0.9, format!("peak P(1,dn,e) = {peak:.4} at Gt = {:.3} (> 0.9)", gt[k]));
    r.check("4 runtime", secs < 10.0, format!("{secs:.2} s with overlay (< 10 s)"));
    let o = sim.overlay.as_ref().unwrap();
    r.check("overlay total vs effective", o.deviation < 0.05, format!("max population deviation over Gt [0, pi] = {:.4} (< 0.05)", o.deviation));
    invariants_line(r, "fig2c", &sim.tables.metadata);
}

fn collapse_revival(r: &mut Report) {
    let cfg = scenarios::load("fig3_collapse_revival").unwrap();
    let (sim, secs) = run("fig3", &cfg);
    let pops = &sim.tables.populations;
    let ent = sim.tables.entanglement.as_ref().unwrap();
    let ana = sim.analytic.as_ref().unwrap();
    let gt = col(pops, "Gt");
    let (lo, hi) = COLLAPSE_WINDOW;
    let (up, e) = (col(pops, "P_up"), col(pops, "P_e"));

    let (ulo, uhi) = range(&window(&gt, &up, lo, hi));
    let (elo, ehi) = range(&window(&gt, &e, lo, hi));
    r.check(
        "5a collapse plateau",
        ulo >= 0.48 && uhi <= 0.52 && elo >= 0.48 && ehi <= 0.52,
        format!("on Gt [{lo}, {hi}]: P_up in [{ulo:.4}, {uhi:.4}], P_e in [{elo:.4}, {ehi:.4}] (within [0.48, 0.52])"),
    );
    let x: Vec<f64> = up.iter().map(|p| 2.0 * p - 1.0).collect();
    let revival = max_abs(window(&gt, &x, 8.0 * PI - 4.0, 8.0 * PI + 4.0));
    r.check("5b revival", revival > 0.3, format!("max |X| on Gt [8pi - 4, 8pi + 4] = {revival:.4} (> 0.3)"));
    let dev = max_abs(up.iter().zip(col(ana, "P_up")).map(|(a, b)| a - b).chain(e.iter().zip(col(ana, "P_e")).map(|(a, b)| a - b)));
    r.check("5c numeric vs analytic", dev < 1e-6, format!("max population deviation {dev:.2e} (< 1e-6)"));
    r.check("5 runtime", secs < 600.0, format!("{secs:.1} s for {} samples at dim {} (< 600 s)", gt.len(), sim.tables.metadata.dim));

    let get = |n: &str| col(ent, n);
    let (e_m_a, e_m_s) = (max_abs(get("E_M_A")), max_abs(get("E_M_S")));
    r.check("6 E_M|A, E_M|S vanish", e_m_a < 1e-8 && e_m_s < 1e-8, format!("max E_M|A = {e_m_a:.2e}, max E_M|S = {e_m_s:.2e} (< 1e-8)"));
    let r_min = get("R_min").into_iter().fold(f64::INFINITY, f64::min);
    r.check("6 monogamy", r_min >= -1e-6, format!("min residual {r_min:.2e} (>= -1e-6)"));
    let egt = get("Gt");
    let (alo, ahi) = range(&window(&egt, &get("E_A_MS"), lo, hi));
    r.check("6 E_A|MS near one", alo >= 0.98 && ahi <= 1.02, format!("E_A|MS on window in [{alo:.5}, {ahi:.5}] (1 +- 0.02)"));
    let sum: Vec<f64> = get("E_A_S").iter().zip(get("R_A_MS")).map(|(e, r)| e * e + r).collect();
    let (slo, shi) = range(&window(&egt, &sum, lo, hi));
    r.check("6 E_A|S^2 + R_A|MS", slo >= 0.97 && shi <= 1.03, format!("on window in [{slo:.5}, {shi:.5}] (1 +- 0.03)"));
    let excess = get("R_A_MS").iter().zip(get("R_M_AS")).map(|(a, m)| a - m).fold(f64::NEG_INFINITY, f64::max);
    r.check("6 R_A|MS <= R_M|AS", excess <= 1e-6, format!("max(R_A|MS - R_M|AS) = {excess:.2e} (<= 1e-6)"));
    let corr = pearson(&window(&egt, &get("E_A_S"), lo, hi), &window(&egt, &get("R_A_MS"), lo, hi)).unwrap_or(f64::NAN);
    r.check("6 E_A|S vs R_A|MS anticorrelated", corr < -0.9, format!("Pearson r = {corr:.5} (< -0.9)"));

    let y = col(ana, "Y");
    let dc = max_abs(get("C_A_S").iter().zip(&y).map(|(c, y)| c - 2.0 * y.abs()));
    r.check("7 concurrence = 2|Y|", dc < 1e-6, format!("max deviation {dc:.2e} (< 1e-6)"));
    let ds = max_abs(get("S_two_qubit").iter().zip(col(ana, "S_M_AS")).map(|(a, b)| a - b));
    r.check("7 entropy of rho_AS", ds < 1e-6, format!("max deviation from the (1 +- delta)/2 formula {ds:.2e} (< 1e-6)"));
    invariants_line(r, "fig3", &sim.tables.metadata);
}

fn dissipative(r: &mut Report) {
    let cfg = scenarios::load("figS8_dissipative_redistribution").unwrap();
    let (sim, secs) = run("figS8", &cfg);
    let ent = sim.tables.entanglement.as_ref().unwrap();
    let (e_m_a, e_m_s) = (max_abs(col(ent, "E_M_A")), max_abs(col(ent, "E_M_S")));
    r.check("8 E_M|A, E_M|S vanish", e_m_a < 1e-8 && e_m_s < 1e-8, format!("max E_M|A = {e_m_a:.2e}, max E_M|S = {e_m_s:.2e} (< 1e-8)"));
    let gt = col(ent, "Gt");
    let e = col(ent, "E_M_AS");
    // The curve has a small local maximum before the main one; judging against
    // the larger of the two is the stricter reading.
    let first_peak = (1..e.len() - 1).find(|&i| e[i] > e[i - 1] && e[i] >= e[i + 1]).map(|i| (gt[i], e[i]));
    let (k, top) = e.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let last = *e.last().unwrap();
    let (ok, detail) = match first_peak {
        Some((g, p)) => (
            last < 0.5 * top,
            format!(
                "E_M|AS(Gt = {:.0}) = {last:.4}; first local maximum {p:.4} at Gt = {g:.2}, largest {top:.4} at Gt = {:.2} (ratio < 0.5)",
                gt.last().unwrap(),
                gt[k]
            ),
        ),
        None => (false, "no peak found".to_string()),
    };
    r.check("8 E_M|AS decays", ok, format!("{detail}; {secs:.1} s"));
    invariants_line(r, "figS8", &sim.tables.metadata);
}

fn switch(r: &mut Report) {
    let cfg = scenarios::load("figS5d_quantum_switch").unwrap();
    let (sim, _) = run("figS5d", &cfg);
    let pops = &sim.tables.populations;
    // Each branch carries half the weight of the initial superposition.
    let (lo, hi) = range(&col(pops, "P_0_up_g"));
    let swing = 2.0 * (hi - lo);
    let leak = max_abs(col(pops, "P_0_up_e"));
    r.check("9 switch g branch", swing > 0.999, format!("population swing {swing:.6} (> 0.999)"));
    r.check("9 switch e branch", leak < 1e-6, format!("max P(0,up,e) = {leak:.2e} (< 1e-6)"));
    invariants_line(r, "figS5d", &sim.tables.metadata);
}

fn jc(r: &mut Report) {
    let cfg = scenarios::load("figS9_jc_comparison").unwrap();
    let (sim, _) = run("figS9", &cfg);
    let ent = sim.tables.entanglement.as_ref().unwrap();
    let (lo, hi) = COLLAPSE_WINDOW;
    let m = max_abs(window(&col(ent, "Gt"), &col(ent, "E_M_A"), lo, hi));
    r.check("12 JC E_M|A nonzero", m > 0.05, format!("max E_M|A on Gt [{lo}, {hi}] = {m:.4} (> 0.05)"));
    invariants_line(r, "figS9", &sim.tables.metadata);
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pure(spec: SpaceSpec, terms: &[(usize, usize, usize, Complex64)]) -> DensityMatrix {
    let mut psi = CVector::zeros(spec.dim());
    for &(n, a, s, amp) in terms {
        psi += basis_state(spec, n, a, s).unwrap() * amp;
    }
    psi /= Complex64::new(psi.norm(), 0.0);
    DensityMatrix::from_pure(&psi, spec).unwrap()
}

// Partial transpose over one tensor factor by explicit index bookkeeping.
fn brute_transpose(m: &CMatrix, dims: &[usize], pos: usize) -> CMatrix {
    let split = |mut i: usize| {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = i % dims[k];
            i /= dims[k];
        }
        d
    };
    let join = |d: &[usize]| d.iter().zip(dims).fold(0, |acc, (&x, &n)| acc * n + x);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let (mut a, mut b) = (split(i), split(j));
            std::mem::swap(&mut a[pos], &mut b[pos]);
            out[(join(&a), join(&b))] = m[(i, j)];
        }
    }
    out
}

fn brute_log_negativity(m: &CMatrix, dims: &[usize], pos: usize) -> f64 {
    let norm: f64 = brute_transpose(m, dims, pos).symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum();
    norm.log2().max(0.0)
}

fn brute_entropy(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().filter(|&&l| l > 1e-14).map(|&l| -l * l.log2()).sum()
}

fn measures(r: &mut Report) {
    let spec = SpaceSpec::new(2).unwrap();
    let h = 0.5f64.sqrt();
    let mut worst = 0.0f64;

    let bell = pure(spec, &[(0, 0, 0, c(h, 0.0)), (0, 1, 1, c(h, 0.0))]);
    let bell_as = partial_trace(&bell, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    worst = worst.max((log_negativity(&bell, Bipartition::AsqScq).unwrap() - 1.0).abs());
    worst = worst.max((concurrence(&bell_as.matrix).unwrap() - 1.0).abs());

    let ghz = pure(spec, &[(0, 0, 0, c(h, 0.0)), (1, 1, 1, c(h, 0.0))]);
    for cut in [Bipartition::MagnonRest, Bipartition::AsqRest, Bipartition::ScqRest] {
        worst = worst.max((log_negativity(&ghz, cut).unwrap() - 1.0).abs());
    }
    for cut in [Bipartition::MagnonAsq, Bipartition::MagnonScq, Bipartition::AsqScq] {
        worst = worst.max(log_negativity(&ghz, cut).unwrap().abs());
    }

    let product = pure(spec, &[(0, 0, 0, c(0.48, 0.0)), (0, 1, 0, c(0.0, 0.36)), (1, 0, 0, c(0.64, 0.0)), (1, 1, 0, c(0.0, 0.48))]);
    for cut in Bipartition::ALL {
        worst = worst.max(log_negativity(&product, cut).unwrap().abs());
    }
    let product_as = partial_trace(&product, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    worst = worst.max(concurrence(&product_as.matrix).unwrap());
    r.check("10 Bell, GHZ, product", worst < 1e-10, format!("max deviation from exact values {worst:.2e} (< 1e-10)"));

    // A full-rank mixed state with no special structure.
    let b = CMatrix::from_fn(8, 8, |i, j| c((1.3 * i as f64 + 0.7 * j as f64).sin(), (0.4 * i as f64 - 1.1 * j as f64).cos()));
    let mut m = &b * b.adjoint();
    let tr = m.trace();
    m /= tr;
    let rho = DensityMatrix::tripartite(m.clone(), spec).unwrap();
    let dims = [2, 2, 2];
    let mut worst = 0.0f64;
    for (cut, pos) in [(Bipartition::MagnonRest, 0), (Bipartition::AsqRest, 1), (Bipartition::ScqRest, 2)] {
        worst = worst.max((log_negativity(&rho, cut).unwrap() - brute_log_negativity(&m, &dims, pos)).abs());
    }
    let rho_as = partial_trace(&rho, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    // ρ_AS = Σ_n ⟨n|ρ|n⟩ over the magnon factor.
    let manual_as = CMatrix::from_fn(4, 4, |i, j| m[(i, j)] + m[(4 + i, 4 + j)]);
    worst = worst.max((rho_as.matrix.clone() - &manual_as).norm());
    worst = worst.max((log_negativity(&rho, Bipartition::AsqScq).unwrap() - brute_log_negativity(&manual_as, &[2, 2], 0)).abs());
    worst = worst.max((von_neumann_entropy(&manual_as).unwrap() - brute_entropy(&manual_as)).abs());
    worst = worst.max((von_neumann_entropy(&m).unwrap() - brute_entropy(&m)).abs());
    // Pure two-qubit states have C = 2|ad - bc|.
    let amps = [c(0.3, 0.1), c(-0.5, 0.2), c(0.1, -0.6), c(0.4, 0.25)];
    let two = pure(spec, &[(0, 0, 0, amps[0]), (0, 0, 1, amps[1]), (0, 1, 0, amps[2]), (0, 1, 1, amps[3])]);
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let expect = 2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm() / norm2;
    let two_as = partial_trace(&two, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    worst = worst.max((concurrence(&two_as.matrix).unwrap() - expect).abs());
    r.check("10 brute-force oracles", worst < 1e-10, format!("max deviation {worst:.2e} on 8x8 and 4x4 states (< 1e-10)"));
}

fn decay(r: &mut Report) {
    let spec = SpaceSpec::new(2).unwrap();
    let ops = build_operators(spec).unwrap();
    let kappa = 1.0;
    let rates = DissipationRates { kappa_a: kappa, ..Default::default() };
    let model = LindbladModel::with_rates(CMatrix::zeros(spec.dim(), spec.dim()), &ops, &rates, DephasingConvention::Literal).unwrap();
    let psi = basis_state(spec, 0, 1, 0).unwrap();
    let grid = TimeGrid::uniform(5.0, 51).unwrap();
    let traj = evolve(&State::Pure(psi), &model, &grid, &EvolveOptions::default()).unwrap();
    let dev = max_abs(traj.times.iter().zip(&traj.states).map(|(&t, s)| populations(t, s, spec, &[]).unwrap().p_up - (-kappa * t).exp()));
    r.check("11 qubit decay", dev < 1e-6, format!("max |P_up - exp(-kappa t)| = {dev:.2e} (< 1e-6)"));
}

#[test]
fn acceptance() {
    let mut r = Report::default();
    couplings(&mut r);
    rabi(&mut r);
    collapse_revival(&mut r);
    dissipative(&mut r);
    switch(&mut r);
    measures(&mut r);
    decay(&mut r);
    jc(&mut r);
    println!("{} criteria failed", r.failed.len());
    assert!(r.failed.is_empty(), "failed criteria: {}", r.failed.join(", "));
}
