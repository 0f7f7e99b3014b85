//! Acceptance checks, one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pattern_spectra::closedform::*;
use pattern_spectra::enumerate::{brute_force_count, pyramid_count};
use pattern_spectra::graphs::*;
use pattern_spectra::pattern::{patterns_of_descent_set, permutations};
use pattern_spectra::spectral::*;
use pattern_spectra::{DescentSet, PatternSet};

type Outcome = Result<String, String>;

fn set(s: &str) -> PatternSet {
    s.parse().unwrap()
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(elapsed < Duration::from_secs(limit_s), format!("took {elapsed:.2?}, limit {limit_s}s"))
}

const L123: f64 = 0.826_993_3;

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let all: Vec<_> = permutations(3).collect();
    for mask in 1u32..64 {
        let s = PatternSet::new(2, all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()))
            .unwrap();
        let t = pyramid_count(&s, 8);
        for n in 0..=8 {
            let b = brute_force_count(&s, n).map_err(|e| e.to_string())?;
            check(t.get(n) == Some(&b), format!("{s} n={n}: pyramid {:?} brute {b}", t.get(n)))?;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("63 sets x n=0..8 equal, {:.2?}", start.elapsed()))
}

fn c2_known_sequences() -> Outcome {
    let start = Instant::now();
    let expect_123 = [1u64, 1, 2, 5, 17, 70, 349, 2017, 13358, 99377];
    let t = pyramid_count(&set("{123}"), 9);
    for (n, &v) in expect_123.iter().enumerate() {
        check(t.get(n) == Some(&BigUint::from(v)), format!("{{123}} n={n}"))?;
    }
    let peaks = pyramid_count(&set("{132,231}"), 14);
    for n in 1..=14 {
        check(peaks.get(n) == Some(&(BigUint::from(1u32) << (n - 1))), format!("{{132,231}} n={n}"))?;
    }
    let two = pyramid_count(&set("{123,213,231,321}"), 14);
    for n in 2..=14 {
        check(two.get(n) == Some(&BigUint::from(2u32)), format!("{{123,213,231,321}} n={n}"))?;
    }
    let e = euler_numbers(14);
    let triple = pyramid_count(&set("{123,231,312}"), 14);
    let up_down = pyramid_count(&set("{123,321}"), 14);
    for n in 2..=14 {
        check(triple.get(n) == Some(&(e.values()[n - 1].clone() * n)), format!("triple n={n}"))?;
        check(up_down.get(n) == Some(&(e.values()[n].clone() * 2u32)), format!("{{123,321}} n={n}"))?;
    }
    // Involution numbers: I_n = I_{n-1} + (n-1) I_{n-2}.
    let mut inv = vec![BigUint::from(1u32), BigUint::from(1u32)];
    for n in 2..=12 {
        let next = &inv[n - 1] + &inv[n - 2] * (n - 1);
        inv.push(next);
    }
    let t = pyramid_count(&set("{312,321}"), 12);
    for (n, v) in inv.iter().enumerate() {
        check(t.get(n) == Some(v), format!("{{312,321}} n={n}"))?;
    }
    within(start.elapsed(), 30)?;
    Ok(format!("all six families exact, {:.2?}", start.elapsed()))
}

fn c3_spectrum_123() -> Outcome {
    let start = Instant::now();
    let s = set("{123}");
    let opts = PowerOptions::default();
    let a = power_iteration(&s, GridSpec::new(2, 128).unwrap(), &opts).map_err(|e| e.to_string())?;
    let b = power_iteration(&s, GridSpec::new(2, 256).unwrap(), &opts).map_err(|e| e.to_string())?;
    let r = richardson(a.eigenvalue.re, b.eigenvalue.re);
    check((r - L123).abs() < 1e-3, format!("Richardson {r}"))?;
    let eigs = arnoldi_eigs(&s, GridSpec::new(2, 256).unwrap(), 3, 30, 0).map_err(|e| e.to_string())?;
    let next = eigs.pairs[1].eigenvalue;
    check((next - Complex64::from(-0.4134967)).norm() < 5e-3, format!("Arnoldi next {next}"))?;
    within(start.elapsed(), 120)?;
    Ok(format!("Richardson {r:.7}, next {:.6}, {:.2?}", next.re, start.elapsed()))
}

fn c4_theorem_123() -> Outcome {
    let t = pyramid_count(&set("{123}"), 25);
    let mut parts = Vec::new();
    for (n, tol) in [(20, 1e-6), (25, 1e-7)] {
        let exact = t.probability(n).unwrap();
        let rel = ((exact - asymptotic_123(n, 1)) / exact).abs();
        check(rel <= tol, format!("n={n}: relative error {rel:e}"))?;
        parts.push(format!("n={n} {rel:.1e}"));
    }
    Ok(parts.join(", "))
}

fn c5_spectrum_213() -> Outcome {
    let l0 = solve_213_dominant(1e-12);
    check((l0 - 0.7839769312).abs() < 1e-9, format!("real root {l0}"))?;
    let pair = polish_213_complex_root(Complex64::new(0.21, 0.21), 1e-13).map_err(|e| e.to_string())?;
    let expected = Complex64::new(0.2141426360, 0.2085807022);
    check((pair.re - expected.re).abs() < 1e-8 && (pair.im - expected.im).abs() < 1e-8, format!("pair {pair}"))?;
    let conj = polish_213_complex_root(Complex64::new(0.21, -0.21), 1e-13).map_err(|e| e.to_string())?;
    check((conj - expected.conj()).norm() < 1e-8, format!("conjugate {conj}"))?;

    let s = set("{213}");
    let opts = PowerOptions::default();
    let a = power_iteration(&s, GridSpec::new(2, 128).unwrap(), &opts).map_err(|e| e.to_string())?;
    let b = power_iteration(&s, GridSpec::new(2, 256).unwrap(), &opts).map_err(|e| e.to_string())?;
    let grid = richardson(a.eigenvalue.re, b.eigenvalue.re);
    check((grid - l0).abs() < 1e-3, format!("grid dominant {grid}"))?;

    let t = pyramid_count(&s, 20);
    let exact = t.probability(20).unwrap();
    let rel = ((asymptotic_213(20) - exact) / exact).abs();
    check(rel < 1e-6, format!("leading term relative error {rel:e}"))?;

    let roots = roots_213_list();
    let min_index = roots.iter().map(|&l| index_residual_213(l)).fold(f64::INFINITY, f64::min);
    check(roots.len() == 5 && min_index > 1e-3, format!("smallest index residual {min_index}"))?;
    Ok(format!(
        "root {l0:.10}, pair {:.10}{:+.10}i, grid {grid:.6}, n=20 rel {rel:.1e}, min index residual {min_index:.3}",
        pair.re, pair.im
    ))
}

fn c6_euler_expansion() -> Outcome {
    let e = euler_numbers(12);
    let mut worst = 0f64;
    for n in 4..=12 {
        let gap = (euler_expansion(n, 99).map_err(|e| e.to_string())? - e.ratio(n).unwrap()).abs();
        worst = worst.max(gap);
    }
    check(worst <= 1e-9, format!("largest gap {worst:e}"))?;
    Ok(format!("largest gap {worst:.1e}"))
}

fn max_gap(n: usize) -> Result<f64, String> {
    let rows = verify_key_identity(&set("{123}"), GridSpec::new(2, n).unwrap(), 10).map_err(|e| e.to_string())?;
    Ok(rows.iter().map(|r| r.relative_gap()).fold(0.0, f64::max))
}

fn c7_key_identity() -> Outcome {
    let g256 = max_gap(256)?;
    let g512 = max_gap(512)?;
    check(g256 <= 2e-2, format!("N=256 largest relative gap {g256}"))?;
    let ratio = g512 / g256;
    check(ratio <= 0.7, format!("gap ratio {ratio}"))?;
    Ok(format!("largest gap {g256:.2e} at N=256, ratio {ratio:.3} on doubling"))
}

fn c8_adjoint_and_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    for (m, n) in [(2, 16), (3, 8)] {
        let spec = GridSpec::new(m, n).unwrap();
        let all: Vec<_> = permutations(m + 1).collect();
        for _ in 0..100 {
            let s = PatternSet::new(m, all.iter().filter(|_| rng.gen_bool(0.3)).cloned()).unwrap();
            let op = TransferOperator::new(&s, spec).unwrap();
            let mut rand_fn = || {
                let v = (0..spec.len())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                GridFunction::new(spec, v).unwrap()
            };
            let (f, g) = (rand_fn(), rand_fn());
            let lhs = inner_product(&op.apply(&f).unwrap(), &g).unwrap();
            let rhs = inner_product(&f, &op.apply_adjoint(&g).unwrap()).unwrap();
            worst = worst.max((lhs - rhs).norm() / (f.norm() * g.norm()));
        }
    }
    check(worst <= 1e-12, format!("adjointness defect {worst:e}"))?;

    let spec = GridSpec::new(2, 16).unwrap();
    let f = GridFunction::from_fn(spec, |x| Complex64::new((7.0 * x[0]).sin() + x[1], x[0] * x[1]));
    for text in ["{123}", "{123,321}", "{123,231,312}"] {
        let s = set(text);
        check(CellKernel::new(&s).unwrap().j_symmetry_witness().is_none(), format!("{text}: kernel witness"))?;
        let op = TransferOperator::new(&s, spec).unwrap();
        let lhs = op.apply_adjoint(&f).unwrap();
        let rhs = involution_j(&op.apply(&involution_j(&f)).unwrap());
        let d = lhs.sub(&rhs).unwrap().max_abs();
        check(d <= 1e-14, format!("{text}: T* - JTJ = {d:e}"))?;
    }
    let s = set("{213}");
    let witness = CellKernel::new(&s).unwrap().j_symmetry_witness().ok_or("no {213} witness")?;
    let spec = GridSpec::new(2, 4).unwrap();
    let op = TransferOperator::new(&s, spec).unwrap();
    let mut point = GridFunction::zeros(spec);
    point.values_mut()[spec.flat(&witness[1..])] = Complex64::new(1.0, 0.0);
    let d = op
        .apply_adjoint(&point)
        .unwrap()
        .sub(&involution_j(&op.apply(&involution_j(&point)).unwrap()))
        .unwrap()
        .max_abs();
    check(d > 0.1, format!("{{213}} witness difference {d}"))?;
    Ok(format!("adjoint defect {worst:.1e}; J-identity exact on 3 sets; {{213}} witness {witness:?} gives {d:.3}"))
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap_or_default()
}

fn c9_graph_layer() -> Outcome {
    let g = build_overlap_graph(&PatternSet::empty(2).unwrap());
    check(g.edges().len() == 6, format!("G_empty has {} edges", g.edges().len()))?;
    check(strongly_connected(&g) == Ok(true) && period(&g) == Ok(1), "G_empty connectivity".into())?;
    let h = build_overlap_graph(&set("{132,231}"));
    check(strongly_connected(&h) == Ok(false), "G_{132,231} strongly connected".into())?;
    let u = DescentSet::new(2, ["aa".parse().unwrap(), "bb".parse().unwrap()]).unwrap();
    let d = build_de_bruijn(&u).map_err(|e| e.to_string())?;
    check(period(&d) == Ok(2), format!("D_{{aa,bb}} period {:?}", period(&d)))?;
    // The 2-cycle matches the +-2/pi pair on the grid.
    let eigs = arnoldi_eigs(&patterns_of_descent_set(&u), GridSpec::new(2, 64).unwrap(), 2, 20, 0)
        .map_err(|e| e.to_string())?;
    let (a, b) = (eigs.pairs[0].eigenvalue, eigs.pairs[1].eigenvalue);
    check(
        (a + b).norm() < 0.05 * a.norm() && (a.norm() - 2.0 / std::f64::consts::PI).abs() < 0.02,
        format!("top pair {a}, {b}"),
    )?;

    let v213 = classify(&set("{213}"), None).map_err(|e| e.to_string())?;
    check(v213.certifies_simple_dominant(), format!("{{213}} verdict {:?}", v213.certificate))?;
    let vpk = classify(&set("{132,231}"), None).map_err(|e| e.to_string())?;
    check(vpk.certificate == Certificate::None, format!("{{132,231}} verdict {:?}", vpk.certificate))?;

    let ua = DescentSet::new(2, ["aa".parse().unwrap()]).unwrap();
    let vaa = classify(&patterns_of_descent_set(&ua), Some(&ua)).unwrap();
    let pretty = |v: &Verdict| serde_json::to_string_pretty(v).unwrap() + "\n";
    let goldens = [
        ("overlap_empty_m2.dot", g.to_dot()),
        ("overlap_132_231.dot", h.to_dot()),
        ("de_bruijn_aa_bb.dot", d.to_dot()),
        ("verdict_213.json", pretty(&v213)),
        ("verdict_132_231.json", pretty(&vpk)),
        ("verdict_d_aa.json", pretty(&vaa)),
    ];
    for (name, actual) in goldens {
        check(golden(name) == actual, format!("golden file {name} differs"))?;
    }
    Ok(format!("6 goldens exact; {{213}} -> {:?}; D_{{aa,bb}} top pair {:.4}, {:.4}", v213.certificate, a.re, b.re))
}

fn c10_descent_fast_path() -> Outcome {
    let opts = PowerOptions::default();
    let u = DescentSet::new(2, ["aa".parse().unwrap()]).unwrap();
    let t0 = Instant::now();
    let one_d = descent_power_iteration(&u, 4096, &opts).map_err(|e| e.to_string())?;
    let fast = t0.elapsed();
    let t1 = Instant::now();
    let full = power_iteration(&set("{123}"), GridSpec::new(2, 256).unwrap(), &opts).map_err(|e| e.to_string())?;
    let slow = t1.elapsed();
    let l = one_d.eigenvalue.re;
    check((l - L123).abs() < 1e-3, format!("1-D eigenvalue {l}"))?;
    let speedup = slow.as_secs_f64() / fast.as_secs_f64();
    check(speedup >= 20.0, format!("speedup {speedup:.1}x ({fast:.2?} vs {slow:.2?})"))?;
    Ok(format!("lambda {l:.6} in {fast:.2?}; full grid {:.6} in {slow:.2?}; {speedup:.0}x", full.eigenvalue.re))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("known sequences", c2_known_sequences),
        ("123 spectrum", c3_spectrum_123),
        ("123 expansion", c4_theorem_123),
        ("213 spectrum", c5_spectrum_213),
        ("Euler expansion", c6_euler_expansion),
        ("key identity", c7_key_identity),
        ("adjointness and symmetry", c8_adjoint_and_symmetry),
        ("graph layer", c9_graph_layer),
        ("descent fast path", c10_descent_fast_path),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
