//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any fails. Each criterion also has a wall-clock budget.

use std::time::{Duration, Instant};

use lfmap::characters::{enumerate_characters, verify_axioms, DirichletCharacter};
use lfmap::lfunction::Target;
use lfmap::preimage::{find_strips, Window};
use lfmap::render::{ppm_bytes, render_two_color, zero_junctions, ColorScheme};
use lfmap::suite::{
    check_factorization, check_functional_equation, check_intertwining_all, check_oracles, check_strips,
    check_zeros, convergence_grid, factorization_grid, fe_points, strip_window, DEFAULT_SEED,
};
use lfmap::zeros::{find_zeros, trivial_zeros};

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

fn run(n: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let o = f();
    let took = t0.elapsed();
    let in_time = took <= budget;
    let pass = o.pass && in_time;
    println!(
        "criterion {n:>2} {:<4} {name}: {}{} [{:.1}s / {}s]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        if in_time { "" } else { " (over budget)" },
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn character_axioms() -> Outcome {
    let mut count = 0;
    for q in 1..=50 {
        for chi in enumerate_characters(q) {
            if let Err(why) = verify_axioms(&chi) {
                return outcome(false, format!("q={q} j={}: {why}", chi.index()));
            }
            count += 1;
        }
    }
    outcome(true, format!("{count} characters, q <= 50"))
}

fn principal_factorization() -> Outcome {
    let grid = factorization_grid();
    let mut worst: f64 = 0.0;
    for q in [2, 6, 14] {
        let r = check_factorization(&DirichletCharacter::principal(q), &grid);
        worst = worst.max(r.worst_value);
        if !r.status.is_pass() {
            return outcome(false, format!("q={q} residual {:e}", r.worst_value));
        }
    }
    outcome(true, format!("worst residual {worst:.2e} < 1e-9"))
}

fn induced_factorization() -> Outcome {
    let grid = factorization_grid();
    let mut worst: f64 = 0.0;
    for star in enumerate_characters(7).into_iter().filter(|c| !c.is_principal()) {
        let chi = star.induce(14).expect("7 divides 14");
        let r = check_factorization(&chi, &grid);
        worst = worst.max(r.worst_value);
        if !r.status.is_pass() {
            return outcome(false, format!("chi* index {} residual {:e}", star.index(), r.worst_value));
        }
    }
    outcome(true, format!("5 characters mod 7 induced to 14, worst {worst:.2e} < 1e-9"))
}

fn functional_equation() -> Outcome {
    let pts = fe_points(DEFAULT_SEED);
    let (mut n, mut worst) = (0, 0.0f64);
    for q in 2..=20 {
        for chi in enumerate_characters(q).into_iter().filter(|c| c.is_primitive()) {
            let r = check_functional_equation(&chi, &pts);
            if !r.status.is_pass() {
                return outcome(false, format!("q={q} j={}: {:?}", chi.index(), r.detail.unwrap_or_default()));
            }
            worst = worst.max(r.worst_value);
            n += 1;
        }
    }
    outcome(true, format!("{n} primitive characters, worst residual {worst:.2e} < 1e-7"))
}

fn zeta_zeros() -> Outcome {
    // independent oracle: sign changes of Hardy's Z, bisected
    let oracle = [14.134725, 21.022040, 25.010858];
    let zeta = enumerate_characters(1).remove(0);
    let zs = match find_zeros(&zeta, 0.0, 30.0, Target::L) {
        Ok(z) => z,
        Err(e) => return outcome(false, e.to_string()),
    };
    if zs.len() != 3 {
        return outcome(false, format!("{} zeros below t = 30", zs.len()));
    }
    for (z, o) in zs.iter().zip(oracle) {
        if (z.location.im - o).abs() > 1e-6 || (z.location.re - 0.5).abs() > 1e-6 {
            return outcome(false, format!("zero {} vs oracle {o}", z.location));
        }
    }
    let strips = match find_strips(&zeta, Window::new(-2.0, 6.0, 40.0, 60.0)) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let Some(strip) = strips
        .iter()
        .find(|s| s.complete && s.zeros_inside.iter().all(|z| (46.0..56.0).contains(&z.location.im)) && !s.zeros_inside.is_empty())
    else {
        return outcome(false, "no complete strip with its zeros in (46, 56)");
    };
    let ims: Vec<f64> = strip.zeros_inside.iter().map(|z| z.location.im).collect();
    let ok = ims.len() == 3 && ims.iter().zip([48.0, 49.8, 53.0]).all(|(a, b)| (a - b).abs() < 0.5);
    outcome(ok, format!("3 zeros below 30 match the oracle; strip zeros {ims:.3?}"))
}

fn zero_checks(criterion6: &mut Option<Outcome>) -> Outcome {
    let mut rh_worst = 0.0f64;
    let mut deriv_min = f64::INFINITY;
    let (mut nz, mut nd) = (0, 0);
    let mut rh_fail = None;
    let mut simple_fail = None;
    for q in [3, 4, 5, 7, 14] {
        for chi in enumerate_characters(q) {
            let z = match check_zeros(&chi, 60.0) {
                Ok(z) => z,
                Err(e) => {
                    rh_fail.get_or_insert(format!("q={q} j={}: {e}", chi.index()));
                    continue;
                }
            };
            nz += z.zeros.len();
            nd += z.derivative_zeros.len();
            rh_worst = rh_worst.max(z.rh.worst_value);
            deriv_min = deriv_min.min(z.simple.worst_value).min(z.simple_derivative.worst_value);
            if !z.rh.status.is_pass() {
                rh_fail.get_or_insert(format!("q={q} j={}: {}", chi.index(), z.rh.detail.clone().unwrap_or_default()));
            }
            for s in [&z.simple, &z.simple_derivative] {
                if !s.status.is_pass() {
                    simple_fail.get_or_insert(format!("q={q} j={}: {}", chi.index(), s.detail.clone().unwrap_or_default()));
                }
            }
        }
    }
    *criterion6 = Some(match rh_fail {
        Some(why) => outcome(false, why),
        None => outcome(true, format!("{nz} zeros of L, worst |Re - 1/2| = {rh_worst:.1e}, pairing < 1e-7")),
    });
    match simple_fail {
        Some(why) => outcome(false, why),
        None => outcome(true, format!("{nz} zeros of L and {nd} of L', min |f'| = {deriv_min:.3e} > 1e-6")),
    }
}

fn strip_structure() -> Outcome {
    let zeta = enumerate_characters(1).remove(0);
    let r = check_strips(&zeta, strip_window(60.0), true);
    let strips = r.parameters["complete_strips"].as_array().map(|a| a.len()).unwrap_or(0);
    let ok = r.status.is_pass() && strips > 0;
    let counts: Vec<String> = r.parameters["complete_strips"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|s| format!("{}/{}", s["zeros"].as_array().map(|z| z.len()).unwrap_or(0), s["branch_points"]))
        .collect();
    outcome(
        ok,
        format!("{strips} complete strips, zeros/branch points {}{}", counts.join(" "), r.detail.map(|d| format!(": {d}")).unwrap_or_default()),
    )
}

fn intertwining() -> Outcome {
    let w = Window::new(-2.0, 6.0, 5.0, 40.0);
    let mut parts = Vec::new();
    for chi in [enumerate_characters(1).remove(0), DirichletCharacter::new(7, 2).unwrap()] {
        assert!(chi.modulus() == 1 || !chi.is_real());
        let r = check_intertwining_all(&chi, w);
        if !r.status.is_pass() {
            return outcome(false, format!("q={}: {}", chi.modulus(), r.detail.unwrap_or_default()));
        }
        parts.push(format!("q={}: {} tangents, worst |Im L'| {:.1e}", chi.modulus(), r.count, r.worst_value));
    }
    outcome(true, parts.join("; "))
}

fn figures() -> Outcome {
    let w = Window::new(-5.0, 5.0, -20.0, 20.0);
    let scheme = ColorScheme::two_color();
    let mut parts = Vec::new();
    // index 4 is the real character mod 14, index 2 a complex one
    for (idx, expect_mirror) in [(4usize, true), (2, false)] {
        let chi = DirichletCharacter::new(14, idx).unwrap();
        let img = match render_two_color(&chi, w, 600, 1200, Target::L) {
            Ok(i) => i,
            Err(e) => return outcome(false, e.to_string()),
        };
        if expect_mirror {
            let again = render_two_color(&chi, w, 600, 1200, Target::L).unwrap();
            if ppm_bytes(&img) != ppm_bytes(&again) {
                return outcome(false, "rendering is not deterministic");
            }
        }
        let mut zs: Vec<_> = match find_zeros(&chi, -20.0, 20.0, Target::L) {
            Ok(z) => z.into_iter().map(|z| z.location).collect(),
            Err(e) => return outcome(false, e.to_string()),
        };
        zs.extend(trivial_zeros(&chi, 64).into_iter().map(|z| z.location).filter(|z| w.contains(*z, 0.0)));
        let junctions = zero_junctions(&img, &scheme, &zs);
        if let Some((z, _)) = junctions.iter().find(|j| !j.1) {
            return outcome(false, format!("index {idx}: zero {z} is not a color junction"));
        }
        if img.is_mirror_symmetric() != expect_mirror {
            return outcome(false, format!("index {idx}: mirror symmetry {}", img.is_mirror_symmetric()));
        }
        parts.push(format!(
            "index {idx} ({}): {} junctions, mirror={}",
            if chi.is_real() { "real" } else { "complex" },
            junctions.len(),
            expect_mirror
        ));
    }
    outcome(true, parts.join("; "))
}

fn oracle_agreement() -> Outcome {
    let grid = convergence_grid();
    let mut worst = 0.0f64;
    let mut n = 0;
    for q in 1..=10 {
        for chi in enumerate_characters(q) {
            let r = check_oracles(&chi, &grid, 20_000);
            if !r.status.is_pass() {
                return outcome(false, format!("q={q} j={}: ratio {:e} at {:?}", chi.index(), r.worst_value, r.worst_location));
            }
            worst = worst.max(r.worst_value);
            n += 1;
        }
    }
    outcome(true, format!("{n} characters, worst |diff| / (combined estimate) = {worst:.2e}"))
}

fn main() {
    let s = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, "character axioms", s(10), character_axioms);
    ok &= run(2, "principal factorization", s(5), principal_factorization);
    ok &= run(3, "induced factorization", s(5), induced_factorization);
    ok &= run(4, "functional equation", s(60), functional_equation);
    ok &= run(5, "zeta zeros", s(60), zeta_zeros);
    // criteria 6 and 7 share one scan; its time counts against both
    let mut c6 = None;
    let t0 = Instant::now();
    let c7 = zero_checks(&mut c6);
    let scan = t0.elapsed();
    ok &= run(6, "zeros on the critical line", s(600).saturating_sub(scan), || c6.unwrap());
    ok &= run(7, "simple zeros of L and L'", s(600).saturating_sub(scan), || c7);
    ok &= run(8, "strips and fundamental domains", s(300), strip_structure);
    ok &= run(9, "intertwining", s(120), intertwining);
    ok &= run(10, "figure reproduction", s(120), figures);
    ok &= run(11, "oracle agreement", s(10), oracle_agreement);
    println!("zero scan for criteria 6-7 took {:.1}s", scan.as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}
