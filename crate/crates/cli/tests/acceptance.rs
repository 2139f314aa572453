//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion,
//! then fails if any criterion failed.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::time::Instant;

use horopack::analysis::{
    six_theorem_gate, slope_length, transverse_disk_obstruction, CuspBasis, Slope,
    OBSTRUCTION_REFERENCE,
};
use horopack::decor::{
    check_geometric, cusp_areas, fixed_points, paper_decoration, saturating_c1, target_length,
    CornerDecoration, DecorationParams, Stability, DEFAULT_RELATIVE_TOL,
};
use horopack::develop::{develop, inject_edge_violation, DevelopOptions};
use horopack::hyp2::horoball_distance;
use horopack::optimize::{density, maximize_min_cusp_area, OptimizeConfig};
use horopack::{color_faces, family_member, icosahedron, Side, Triangulation, VertexType};
use horopack_cli::{run_with, Streams, EXIT_OK};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cli(args: &[&str], stdin: &[u8]) -> (i32, Vec<u8>) {
    let mut input = stdin;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("horopack").chain(args.iter().copied());
    let code = run_with(
        argv,
        &mut Streams {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    (code, out)
}

fn thrice_punctured() -> Triangulation {
    Triangulation::from_triangles(3, vec![[0, 1, 2], [0, 2, 1]]).unwrap()
}

fn counts() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for m in 1..=6u32 {
        let t = family_member(m);
        let n = (m * m) as usize;
        let hist = t.degree_histogram();
        let ok = t.triangle_count() == 80 * n
            && t.vertex_count() == 40 * n + 2
            && t.edge_count() == 120 * n
            && t.euler_characteristic() == 2
            && hist.get(&5) == Some(&12)
            && hist.get(&6) == Some(&(40 * n + 2 - 12))
            && hist.len() == 2;
        if !ok {
            bad.push(m);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 1.0,
        format!("m = 1..6 exact counts, failures {bad:?}, {secs:.3} s"),
    )
}

fn edge_distance() -> Outcome {
    let t = thrice_punctured();
    let opts = DevelopOptions {
        require_geometric: false,
        ..DevelopOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        // (0, 2]: 1 − U lies in (0, 1]
        let a = 2.0 * (1.0 - rng.gen::<f64>());
        let b = 2.0 * (1.0 - rng.gen::<f64>());
        let c = 2.0 * (1.0 - rng.gen::<f64>());
        let dec = CornerDecoration::new(vec![[a, b, c], [a, c, b]]).unwrap();
        let dev = develop(&t, &dec, &opts).unwrap();
        let h = dev.horoballs[0];
        let d = horoball_distance(&h[0], &h[1]).unwrap();
        worst = worst.max((d + (a * b).ln()).abs());
    }
    outcome(worst < 1e-12, format!("10^4 samples, max error {worst:e}"))
}

fn recursion_constants() -> Outcome {
    let fp = fixed_points(target_length()).unwrap();
    let small = (fp[0].value - 2.0 / 3f64.sqrt()).abs();
    let big = (fp[1].value - 3f64.sqrt()).abs();
    let classes =
        fp[0].stability == Stability::Attracting && fp[1].stability == Stability::Repelling;
    let c1 = saturating_c1();
    let formula = (3f64.sqrt() + (3.0 + 5.0 * 3f64.sqrt()).sqrt()) / 5.0;
    // the quoted value is 5.6e-7 above c1, so "to 6 decimals" means within 1e-6
    let quoted = (c1 - 1.029353).abs();
    let six_places = quoted < 1e-6;
    let residual = (2.0 / (c1 * c1) + 4.0 / c1 - target_length()).abs();
    outcome(
        small < 1e-12
            && big < 1e-12
            && classes
            && (c1 - formula).abs() < 1e-15
            && six_places
            && residual < 1e-9,
        format!(
            "fixed point errors {small:e}, {big:e}; c1 = {c1} (off 1.029353 by {quoted:.1e}), residual {residual:e}"
        ),
    )
}

fn main_construction() -> Outcome {
    let (code, surface) = cli(&["decorate", "--epsilon", "0.01"], b"");
    if code != EXIT_OK {
        return outcome(false, format!("decorate exited {code}"));
    }
    let (code, areas) = cli(&["--json", "areas"], &surface);
    let areas: Value = serde_json::from_slice(&areas).unwrap();
    let min = areas["report"]["min_area"].as_f64().unwrap();
    let cf = areas["report"]["max_closed_form_error"].as_f64().unwrap();
    let loaded =
        horopack::persist::surface_from_str(std::str::from_utf8(&surface).unwrap()).unwrap();
    let m = loaded.params.as_ref().unwrap().m;
    let geo = check_geometric(
        &loaded.triangulation,
        loaded.decoration.as_ref().unwrap(),
        DEFAULT_RELATIVE_TOL,
    )
    .unwrap()
    .is_geometric();
    let want = target_length() - 0.01;

    let start = Instant::now();
    let t = color_faces(&family_member(50)).unwrap();
    let p = DecorationParams::from_recursion(50).unwrap();
    let dec = paper_decoration(&t, &p).unwrap();
    let geo50 = check_geometric(&t, &dec, DEFAULT_RELATIVE_TOL)
        .unwrap()
        .is_geometric();
    let rep50 = cusp_areas(&t, &dec, Some(&p)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let cf50 = rep50.max_closed_form_error().unwrap();
    outcome(
        code == EXIT_OK && min >= want && geo && cf < 1e-9 && geo50 && cf50 < 1e-9 && secs < 10.0,
        format!(
            "m = {m}: min area {min:.9} >= {want:.6}, closed form error {cf:e}; m = 50 in {secs:.2} s, error {cf50:e}"
        ),
    )
}

fn gray_values() -> Outcome {
    let l = target_length();
    let (mut t4, mut t5, mut t6) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for m in 2..=6u32 {
        let t = family_member(m);
        let p = DecorationParams::from_recursion(m).unwrap();
        let dec = paper_decoration(&t, &p).unwrap();
        for v in cusp_areas(&t, &dec, Some(&p)).unwrap().vertices {
            match v.vertex_type {
                VertexType::GrayCorner => t4 = t4.max((v.area - l).abs()),
                VertexType::GrayEdge => t5 = t5.min(v.area),
                VertexType::GrayInterior => t6 = t6.min(v.area),
                _ => {}
            }
        }
    }
    outcome(
        t4 < 1e-9 && t5 >= 5.915 && t6 >= 6.0 - 1e-9,
        format!("m = 2..6: type 4 error {t4:e}, type 5 min {t5:.6}, type 6 min {t6:.9}"),
    )
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = DevelopOptions {
        require_geometric: false,
        ..DevelopOptions::default()
    };
    let (mut flat, mut ratio_err, mut others) = (0.0f64, 0.0f64, 0.0f64);
    let mut moved = f64::INFINITY;
    for m in 1..=3u32 {
        let t = family_member(m);
        for _ in 0..5 {
            let c: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..=2.0)).collect();
            let p = DecorationParams::new(c).unwrap();
            let dec = paper_decoration(&t, &p).unwrap();
            let dev = develop(&t, &dec, &opts).unwrap();
            for h in dev.holonomies() {
                flat = flat.max((h.scaling - 1.0).abs());
            }
            let s = Side {
                triangle: rng.gen_range(0..t.triangle_count()),
                index: rng.gen_range(0..3),
            };
            let bad = inject_edge_violation(&dec, s, E).unwrap();
            let dev = develop(&t, &bad, &opts).unwrap();
            let (a, b) = t.edge_endpoints(t.edge_of(s));
            let hol = dev.holonomies();
            let (sa, sb) = (hol[a].scaling, hol[b].scaling);
            ratio_err = ratio_err.max((sa.max(sb) / sa.min(sb) - E).abs());
            moved = moved.min((sa - 1.0).abs().min((sb - 1.0).abs()));
            for h in hol.iter().filter(|h| h.vertex != a && h.vertex != b) {
                others = others.max((h.scaling - 1.0).abs());
            }
        }
    }
    outcome(
        flat < 1e-9 && ratio_err < 1e-6 && others < 1e-9 && moved > 0.1,
        format!(
            "max |scaling − 1| {flat:e}; injected ratio error {ratio_err:e}, incident cusps moved at least {moved:.4}, other cusps {others:e}"
        ),
    )
}

fn density_check() -> Outcome {
    let mut worst = 0.0f64;
    for t in [icosahedron(), thrice_punctured()] {
        let dec = CornerDecoration::uniform(&t, 1.0).unwrap();
        worst = worst.max((density(&t, &dec).unwrap() - 3.0 / PI).abs());
    }
    outcome(worst < 1e-12, format!("max error {worst:e}"))
}

fn optimizer_oracles() -> Outcome {
    let cfg = OptimizeConfig::default();
    let start = Instant::now();
    let three = maximize_min_cusp_area(&thrice_punctured(), &cfg).unwrap();
    let s3 = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let ico = maximize_min_cusp_area(&icosahedron(), &cfg).unwrap();
    let s20 = start.elapsed().as_secs_f64();
    outcome(
        (three.min_area - 2.0).abs() < 1e-3
            && (ico.min_area - 5.0).abs() < 1e-3
            && s3 < 60.0
            && s20 < 60.0
            && three.certificate.is_geometric()
            && ico.certificate.is_geometric(),
        format!(
            "thrice-punctured {:.9} in {s3:.2} s, icosahedron {:.9} in {s20:.2} s",
            three.min_area, ico.min_area
        ),
    )
}

fn slope_and_gate() -> Outcome {
    let basis = CuspBasis::new(Complex64::new(2.0, -1.0), Complex64::new(1.0, 2.0)).unwrap();
    let len = slope_length(&basis, Slope::new(2, 1).unwrap());
    let gate = six_theorem_gate(&[target_length(), 5.318, 6.0]).unwrap();
    let margin = |i: usize, filling: &str| {
        let m = gate.entries[i]
            .margins
            .iter()
            .find(|r| r.filling == filling)
            .unwrap();
        (m.one_cusp, m.multi_cusp)
    };
    let e = &gate.entries;
    let l = target_length();
    // 10/√3 ties the multi-cusp reducible record and beats every smaller one
    let row0 = !e[0].hyperbolic_forced
        && margin(0, "reducible").1.abs() < 1e-15
        && margin(0, "small_seifert_fibered").1 > 0.0
        && margin(0, "finite").1 > 0.0
        && margin(0, "toroidal").1 < 0.0
        && e[0].above == Some(5.0)
        && e[0].below == Some(l);
    let row1 = !e[1].hyperbolic_forced
        && margin(1, "small_seifert_fibered").1 > 0.0
        && margin(1, "reducible").1 < 0.0
        && e[1].above == Some(5.0)
        && e[1].below == Some(l);
    let row2 = !e[2].hyperbolic_forced
        && margin(2, "toroidal").0 == 0.0
        && e[2].above == Some(l)
        && e[2].below == Some(6.0);
    outcome(
        (len - 5.0).abs() < 1e-12 && row0 && row1 && row2 && gate.exceptional_not_excluded,
        format!("|2(2−i) + (1+2i)| = {len}; gate rows {row0}/{row1}/{row2}"),
    )
}

fn obstruction() -> Outcome {
    let (depth, res) = OBSTRUCTION_REFERENCE;
    let radii: Vec<f64> = (0..=depth)
        .map(|d| {
            transverse_disk_obstruction(d, res, false)
                .unwrap()
                .max_disk_radius
        })
        .collect();
    let monotone = radii.windows(2).all(|w| w[1] <= w[0]);
    let rep = transverse_disk_obstruction(depth, res, false).unwrap();
    outcome(
        monotone && rep.empty_within_tolerance,
        format!(
            "radii {:?}; depth {depth}, resolution {res}: largest {:e} < {}",
            radii.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>(),
            rep.max_disk_radius,
            rep.tolerance
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"restarts": 3, "seed": 9, "max_iterations": 400}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let (_, bare) = cli(&["construct", "--m", "1"], b"");
    let (_, decorated) = cli(&["decorate", "--c", "1.0293524442242366,1.07"], b"");
    let (_, ico) = cli(&["construct", "--m", "0"], b"");
    let cases: Vec<(Vec<&str>, &[u8])> = vec![
        (vec!["construct", "--m", "2"], b""),
        (vec!["decorate", "--epsilon", "0.05"], b""),
        (vec!["decorate", "--c", "1.2,1.1"], b""),
        (vec!["verify", "--json"], &decorated),
        (vec!["verify"], &bare),
        (vec!["areas", "--json"], &decorated),
        (vec!["areas"], &decorated),
        (vec!["develop", "--json"], &decorated),
        (vec!["render", "--labels"], &decorated),
        (vec!["recursion", "--steps", "12"], b""),
        (vec!["optimize", "--json", "--config", cfg], &ico),
        (
            vec!["slope", "--tau1", "2,-1", "--tau2", "1,2", "--pq", "2,1"],
            b"",
        ),
        (
            vec!["obstruct", "--json", "--depth", "4", "--resolution", "100"],
            b"",
        ),
    ];
    let mut differing = Vec::new();
    for (args, stdin) in &cases {
        let first = cli(args, stdin);
        let second = cli(args, stdin);
        if first != second || first.0 != EXIT_OK || first.1.is_empty() {
            differing.push(args[0]);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} invocations repeated, differing {differing:?}",
            cases.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 11] = [
        ("counts", counts),
        ("edge distance", edge_distance),
        ("recursion constants", recursion_constants),
        ("main construction", main_construction),
        ("gray-region values", gray_values),
        ("completeness", completeness),
        ("density", density_check),
        ("optimizer oracles", optimizer_oracles),
        ("slope arithmetic", slope_and_gate),
        ("obstruction probe", obstruction),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let line = format!(
            "criterion {:>2} {} {name}: {}\n",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        // bypass the test harness capture so the lines always show
        let _ = stdout.lock().write_all(line.as_bytes());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
