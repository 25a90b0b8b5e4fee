//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tempfile::TempDir;
use trapchain::pipeline::{f2_perturbation, files, run_pipeline, PipelineRun, RunConfig};
use trapchain_core::approx::{make_f2, sample_regions, validation_errors};
use trapchain_core::dynamics::nested_enclosure_orbit;
use trapchain_core::interval::{box_add, box_mul, exp_box, horner_box, ComplexBox, ProductBox, RealInterval};
use trapchain_core::scaffold::{
    auto_bbox, generate_scaffold, nersesjan_check, product_domains, validate_scaffold, w_range, Label,
};
use trapchain_core::targets::{exp_tolerance, f2_tolerance, TargetVariant};
use trapchain_core::verify::{certify_inclusion, domain_box, image_enclosure, inclusions, Budget, CertStatus};
use trapchain_core::Complex64;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Run {
    dir: TempDir,
    run: PipelineRun,
    wall: Duration,
}

fn pipeline(variant: TargetVariant, seed: u64) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let rc = RunConfig {
        variant,
        seed,
        out: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let t = Instant::now();
    let run = run_pipeline(&rc);
    Run {
        dir,
        run,
        wall: t.elapsed(),
    }
}

fn certified(run: &PipelineRun, source: &str, target: &str) -> Result<(), String> {
    let c = run
        .certificates
        .iter()
        .find(|c| c.source == source && c.target == target)
        .ok_or(format!("no certificate {source} -> {target}"))?;
    check(
        c.status == CertStatus::Certified && c.max_depth <= 24 && c.boxes_examined <= 1_000_000,
        format!("{source} -> {target}: {} ({} boxes, depth {})", c.status, c.boxes_examined, c.max_depth),
    )
}

fn c1() -> Outcome {
    let t = Instant::now();
    let mut n = 0;
    for delta in [0.1, 0.5, 0.9, 0.99] {
        for depth in 1..=8 {
            for growth in [2.0, 3.0, 10.0] {
                let c = generate_scaffold(delta, depth, growth).map_err(|e| e.to_string())?;
                let v = validate_scaffold(&c);
                check(v.passed() && nersesjan_check(&c).passed(), format!("{delta} {depth} {growth}"))?;
                check(c.ells.iter().all(|l| 17.0 * delta / 16.0 < l / 8.0), "l/8 bound")?;
                n += 1;
            }
        }
    }
    let dt = t.elapsed();
    check(dt < Duration::from_secs(1), format!("took {dt:?}"))?;
    Ok(format!("{n}/96 configurations valid in {:.3} s", dt.as_secs_f64()))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0usize;
    for _ in 0..1000 {
        let target = Complex64::new(rng.gen_range(-5.0..8.0), rng.gen_range(-3.2..3.2));
        let radius = 10f64.powf(rng.gen_range(-4.0..2.0));
        let tol = exp_tolerance(target, radius);
        let et = target.exp();
        for _ in 0..10_000 {
            let z = target + Complex64::from_polar(tol * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            if (z.exp() - et).norm() > radius {
                bad += 1;
            }
        }
    }
    let dt = t.elapsed();
    check(bad == 0, format!("{bad} violations"))?;
    check(dt < Duration::from_secs(10), format!("took {dt:?}"))?;
    Ok(format!("10^7 samples, 0 violations in {:.2} s", dt.as_secs_f64()))
}

fn rand_box(rng: &mut ChaCha8Rng, c: f64, h: f64) -> ComplexBox {
    let (x, y) = (rng.gen_range(-c..c), rng.gen_range(-c..c));
    let (a, b) = (rng.gen_range(0.0..h), rng.gen_range(0.0..h));
    ComplexBox::new(RealInterval::new(x - a, x + a), RealInterval::new(y - b, y + b))
}

fn inside(rng: &mut ChaCha8Rng, b: &ComplexBox) -> Complex64 {
    Complex64::new(rng.gen_range(b.re.lo..=b.re.hi), rng.gen_range(b.im.lo..=b.im.hi))
}

fn c3(w: &Run) -> Outcome {
    let t = Instant::now();
    let m = w.run.map.as_ref().ok_or("no map")?;
    let cfg = w.run.scaffold.as_ref().ok_or("no scaffold")?;
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = [0usize; 5];
    for _ in 0..n {
        let (a, b) = (rand_box(&mut rng, 50.0, 10.0), rand_box(&mut rng, 50.0, 10.0));
        let (x, y) = (inside(&mut rng, &a), inside(&mut rng, &b));
        bad[0] += !box_add(&a, &b).contains(x + y) as usize;
        bad[1] += !box_mul(&a, &b).contains(x * y) as usize;
        let e = rand_box(&mut rng, 20.0, 4.0);
        let z = inside(&mut rng, &e);
        bad[2] += !exp_box(&e).map(|r| r.contains(z.exp())).unwrap_or(false) as usize;
    }
    // polynomial and map enclosures on pieces of the fitted source disks
    let doms: Vec<_> = inclusions(cfg, TargetVariant::Wandering).into_iter().map(|i| i.source).collect();
    for i in 0..n {
        let d = &doms[i % doms.len()];
        let db = domain_box(d).ok_or("unbounded source")?;
        let f = 10f64.powf(rng.gen_range(-4.0..-0.5));
        let z0 = inside(&mut rng, &db.z);
        let hz = f * (db.z.re.hi - db.z.re.lo);
        let zb = ComplexBox::new(RealInterval::new(z0.re - hz, z0.re + hz), RealInterval::new(z0.im - hz, z0.im + hz));
        let w0 = rng.gen_range(db.w.lo..=db.w.hi);
        let hw = f * (db.w.hi - db.w.lo);
        let b = ProductBox {
            z: zb,
            w: RealInterval::new(w0 - hw, w0 + hw),
        };
        let z = inside(&mut rng, &zb);
        let w = rng.gen_range(b.w.lo..=b.w.hi);
        bad[3] += !horner_box(&m.f1, &zb).contains(m.f1.eval(z)) as usize;
        let (iz, iw) = m.apply(z, w);
        bad[4] += !image_enclosure(m, &b).map(|r| r.contains(iz, iw)).unwrap_or(true) as usize;
    }
    let dt = t.elapsed();
    check(bad == [0; 5], format!("violations add/mul/exp/horner/image = {bad:?}"))?;
    check(dt < Duration::from_secs(30), format!("took {dt:?}"))?;
    Ok(format!("5 x 10^5 trials, 0 violations in {:.2} s", dt.as_secs_f64()))
}

fn c4(w: &Run) -> Outcome {
    let r = &w.run;
    check(r.report.exit_code == 0, format!("exit {}: {:?}", r.report.exit_code, r.report.error))?;
    let cfg = r.scaffold.as_ref().unwrap();
    let target = r.target.as_ref().unwrap();
    let f1 = &r.synthesis.as_ref().unwrap().approximant;
    let v = TargetVariant::Wandering;
    let fresh = sample_regions(cfg, v, &auto_bbox(cfg, v), 0.37).map_err(|e| e.to_string())?;
    let errs = validation_errors(f1, target, &fresh);
    let mut worst: f64 = 0.0;
    for e in &target.entries {
        let ratio = errs[&e.region.to_string()] / e.tolerance;
        worst = worst.max(ratio);
    }
    check(worst < 0.9, format!("fresh-grid ratio {worst:.3}"))?;
    for (s, t) in [("B'1", "B'2"), ("B'2", "B'3"), ("G2", "G2")] {
        certified(r, s, t)?;
    }
    for k in 1..=cfg.depth {
        certified(r, &format!("M'{k}"), "G2")?;
    }
    check(
        r.certificates.iter().all(|c| c.status == CertStatus::Certified),
        "an inclusion is uncertified",
    )?;
    check(w.wall < Duration::from_secs(300), format!("took {:?}", w.wall))?;
    Ok(format!(
        "degree {}, fresh-grid worst {:.3} of tolerance, {} certificates, {:.2} s",
        f1.degree,
        worst,
        r.certificates.len(),
        w.wall.as_secs_f64()
    ))
}

fn c5(a: &Run) -> Outcome {
    let r = &a.run;
    check(r.report.exit_code == 0, format!("exit {}: {:?}", r.report.exit_code, r.report.error))?;
    for k in 1..=3 {
        let b = format!("B'{k}");
        certified(r, &b, &b)?;
    }
    let cfg = r.scaffold.as_ref().unwrap();
    let d = product_domains(cfg, TargetVariant::Attracting)
        .into_iter()
        .find(|d| d.label == Label::B(1))
        .unwrap();
    let orbit = nested_enclosure_orbit(r.map.as_ref().unwrap(), domain_box(&d).unwrap(), 50).map_err(|e| e.to_string())?;
    let diam: Vec<f64> = orbit.iter().map(|b| b.z.diameter()).collect();
    check(diam.windows(2).all(|p| p[1] <= p[0]), format!("{diam:?}"))?;
    Ok(format!("3 self-inclusions; B'1 z-diameter {:.3e} -> {:.3e} over 50 steps", diam[0], diam[50]))
}

fn c6(c: &Run) -> Outcome {
    let r = &c.run;
    check(r.report.exit_code == 0, format!("exit {}: {:?}", r.report.exit_code, r.report.error))?;
    let g = r.graph.as_ref().unwrap();
    for k in 1..=3 {
        let a = format!("A'{k}");
        certified(r, &a, "B'1")?;
        check(g.forward_path(&a) == [a.as_str(), "B'1", "B'2", "B'3"], format!("{a}: {:?}", g.forward_path(&a)))?;
        let cls = g.class(&a).unwrap();
        for j in (1..=3).filter(|&j| j != k) {
            let other = format!("A'{j}");
            let p = cls.common_path_with.iter().find(|p| p.other == other).ok_or(format!("{a} vs {other}"))?;
            check(p.m == 1 && p.n == 1 && p.at == "B'1", format!("{a} vs {other}: {p:?}"))?;
        }
    }
    Ok("A'1, A'2, A'3 merge at B'1 (m = n = 1), then B'1 -> B'2 -> B'3".into())
}

fn c7(runs: &[&Run]) -> Outcome {
    let mut domains = 0;
    for r in runs {
        for o in &r.run.orbits {
            check(o.trials == 100 && o.failures == 0, format!("{} -> {}: {} failures", o.source, o.target, o.failures))?;
            domains += 1;
        }
    }
    Ok(format!("{domains} source domains x 100 points, 0 failures"))
}

fn c8(w: &Run) -> Outcome {
    let cfg = w.run.scaffold.as_ref().unwrap();
    let range = w_range(cfg, TargetVariant::Wandering);
    check(range >= 2.25, format!("w range {range}"))?;
    let d1 = f2_tolerance();
    let zero = make_f2(d1, None, range).map_err(|e| e.to_string())?;
    let samples = 100_000;
    let sup = |p: &trapchain_core::approx::PolyApproximant, r: f64| {
        (0..=samples)
            .map(|i| {
                let w = -r + 2.0 * r * i as f64 / samples as f64;
                (p.eval(Complex64::new(w, 0.0)).exp() - 1.0).norm()
            })
            .fold(0.0, f64::max)
    };
    check(sup(&zero, range) == 0.0, "zero f2 is not identically 0")?;
    let p = make_f2(d1, f2_perturbation(0.01).as_ref(), 2.25).map_err(|e| e.to_string())?;
    let s = sup(&p, 2.25);
    check(s < 1.0 / 16.0, format!("0.01 w reaches {s}"))?;
    check(make_f2(d1, f2_perturbation(0.05).as_ref(), 2.25).is_err(), "0.05 w accepted")?;
    Ok(format!("zero: 0; 0.01 w: sup {s:.5} < 1/16; 0.05 w rejected"))
}

fn digest(dir: &Path, name: &str) -> Result<[u8; 32], String> {
    let bytes = fs::read(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
    Ok(Sha256::digest(bytes).into())
}

fn c9(w: &Run) -> Outcome {
    let again = pipeline(TargetVariant::Wandering, w.run.report.config.as_ref().unwrap().seed);
    for f in [files::CERTIFICATES, files::GRAPH, files::SCAFFOLD_PPM, files::BANDS_PPM] {
        check(digest(w.dir.path(), f)? == digest(again.dir.path(), f)?, format!("{f} differs"))?;
    }
    let norm = |r: &Run| {
        let mut s = r.run.report.stable();
        if let Some(c) = s.config.as_mut() {
            c.out = "out".into();
        }
        s
    };
    check(norm(w) == norm(&again), "reports differ outside the timestamp")?;
    Ok("certificates, graph and both PPMs hash-identical across two runs".into())
}

fn c10(w: &Run) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = w.run.scaffold.clone().unwrap();
    cfg.deltas[1] = cfg.deltas[0] + cfg.ells[0];
    let file = dir.path().join("overlap.json");
    fs::write(&file, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = dir.path().join("out");
    let rc = RunConfig {
        scaffold_file: Some(file),
        out: out.clone(),
        ..RunConfig::default()
    };
    let run = run_pipeline(&rc);
    check(run.report.exit_code == 1, format!("exit {}", run.report.exit_code))?;
    let failed = run.checks.as_ref().unwrap().failed_constraints();
    check(!failed.is_empty(), "no constraint reported")?;
    let written = fs::read_to_string(out.join(files::REPORT)).map_err(|e| e.to_string())?;
    check(failed.iter().all(|c| written.contains(c.as_str())), "report does not name the constraints")?;

    let cfg = w.run.scaffold.as_ref().unwrap();
    let b1 = product_domains(cfg, TargetVariant::Wandering)
        .into_iter()
        .find(|d| d.label == Label::B(1))
        .unwrap();
    let cert = certify_inclusion(w.run.map.as_ref().unwrap(), &b1, &b1, Budget::default()).map_err(|e| format!("{e:?}"))?;
    check(cert.status == CertStatus::Failed, format!("B'1 -> B'1 {}", cert.status))?;
    let wit = cert.witness.ok_or("no witness")?;
    check(b1.contains(wit.z, wit.w) && !b1.contains(wit.image_z, wit.image_w), "witness does not refute")?;
    Ok(format!(
        "overlap exits 1 naming {}; B'1 -> B'1 failed at z = {:.4}",
        failed.join(", "),
        wit.z
    ))
}

fn main() {
    let wandering = pipeline(TargetVariant::Wandering, 7);
    let attracting = pipeline(TargetVariant::Attracting, 7);
    let common = pipeline(TargetVariant::CommonPath, 7);
    let results = [
        c1(),
        c2(),
        c3(&wandering),
        c4(&wandering),
        c5(&attracting),
        c6(&common),
        c7(&[&wandering, &attracting, &common]),
        c8(&wandering),
        c9(&wandering),
        c10(&wandering),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {}: PASS {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
