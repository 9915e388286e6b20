// Temporary calibration harness; not part of the deliverable.
use std::time::Instant;

use flexdo::*;

fn gap_env() -> Environment {
    presets::default_environment()
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if which == "exh20" || which == "all" {
        let dag = generate_dag(&GenParams::default().with_n_tasks(20, 20).with_seed(777)).unwrap();
        let t = Instant::now();
        let opt = exhaustive_optimal(&dag, &gap_env()).unwrap();
        println!(
            "exhaustive N=20: {:.2} s, makespan {:.3}, candidates {}",
            t.elapsed().as_secs_f64(),
            opt.makespan,
            opt.candidates_evaluated
        );
    }

    if which == "crit1" || which == "all" {
        let t = Instant::now();
        let mut worst: f64 = 0.0;
        for seed in 0..100u64 {
            let dag = generate_dag(&GenParams::default().with_n_tasks(8, 12).with_seed(seed)).unwrap();
            let n = dag.n_offloadable();
            let env = gap_env();
            let opt = exhaustive_optimal(&dag, &env).unwrap();
            let heur = flexdo(&dag, &env, FlexdoParams::new(n)).unwrap();
            let rel = (heur.makespan - opt.makespan).abs() / opt.makespan.max(1e-30);
            worst = worst.max(rel);
        }
        println!("crit1: worst rel diff {:.3e}, {:.1} s", worst, t.elapsed().as_secs_f64());
    }

    if which == "crit2" || which == "all" {
        let t = Instant::now();
        let mut gaps = (Vec::new(), Vec::new(), Vec::new());
        for seed in 0..200u64 {
            let dag =
                generate_dag(&GenParams::default().with_n_tasks(14, 18).with_seed(1000 + seed))
                    .unwrap();
            let n = dag.n_offloadable();
            let env = gap_env();
            let opt = exhaustive_optimal(&dag, &env).unwrap();
            let s_n = (n as f64).log2().ceil() as usize;
            let s_n2 = (2.0 * (n as f64).log2()).ceil() as usize;
            let g0 = flexdo(&dag, &env, FlexdoParams::new(0)).unwrap();
            let gn = flexdo(&dag, &env, FlexdoParams::new(s_n.min(n))).unwrap();
            let gn2 = flexdo(&dag, &env, FlexdoParams::new(s_n2.min(n))).unwrap();
            gaps.0.push(relative_gap(g0.makespan, opt.makespan).unwrap());
            gaps.1.push(relative_gap(gn.makespan, opt.makespan).unwrap());
            gaps.2.push(relative_gap(gn2.makespan, opt.makespan).unwrap());
        }
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let max = |v: &Vec<f64>| v.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "crit2: mean gap0 {:.2}% gapN {:.2}% gapN2 {:.2}% | max gapN {:.2}% | {:.1} s",
            mean(&gaps.0),
            mean(&gaps.1),
            mean(&gaps.2),
            max(&gaps.1),
            t.elapsed().as_secs_f64()
        );
    }

    if which == "census" || which == "all" {
        for (mc, ec, rate) in [
            (CpuCount::Limited(8), 1u32, 20.0),
            (CpuCount::Limited(8), 2, 20.0),
            (CpuCount::Unlimited, 1, 20.0),
            (CpuCount::Unlimited, 2, 20.0),
            (CpuCount::Limited(4), 1, 10.0),
            (CpuCount::Limited(8), 16, 20.0),
        ] {
            let mut env = presets::default_environment();
            env.mobile.cpus = mc;
            env.edge.cpus = CpuCount::Limited(ec);
            env.channel_rate = env::mbps_to_bytes_per_sec(rate);
            let t = Instant::now();
            let mut violations = 0;
            for seed in 0..200u64 {
                let dag =
                    generate_dag(&GenParams::default().with_n_tasks(10, 12).with_seed(5000 + seed))
                        .unwrap();
                let opt = exhaustive_optimal(&dag, &env).unwrap();
                if !one_climb_compliant(&dag, &opt.decision).unwrap() {
                    violations += 1;
                }
            }
            println!(
                "census mobile={mc} edge={ec} rate={rate}: {violations}/200 violations, {:.1} s",
                t.elapsed().as_secs_f64()
            );
        }
    }

    if which == "big" || which == "all" {
        let params = GenParams::default().with_n_tasks(100, 100).with_seed(99);
        let dag = generate_dag(&params).unwrap();
        let t = Instant::now();
        let out = flexdo(&dag, &gap_env(), FlexdoParams::log_n(100)).unwrap();
        println!(
            "flexdo-N on N=100: {:.2} s, {} candidates, makespan {:.2}",
            t.elapsed().as_secs_f64(),
            out.candidates_evaluated,
            out.makespan
        );
    }
}
