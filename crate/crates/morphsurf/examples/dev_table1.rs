use morphsurf::crossbar::*;
use morphsurf::scanner::*;

fn main() {
    let dyn_cfg = PixelDynamicsConfig::default();
    for (label, bf) in [("without blockers", 1.0), ("with blockers", calibrated::BLOCKER_FACTOR)] {
        println!("--- {label} (blocker_factor {bf}) ---");
        let net = build_network(&CrossbarConfig { blocker_factor: bf, ..CrossbarConfig::default() }).unwrap();
        for demo in 1..=4 {
            let target = demo_target(demo, 6);
            let opts = ScanOptions::default();
            let ps = scan_target(&net, &target, Protocol::Ps, &dyn_cfg, &opts).unwrap();
            let dpa = match scan_target(&net, &target, Protocol::Dpa, &dyn_cfg, &opts) {
                Ok(out) => format!("{:6.2}%", out.stats.mean_abs_error_pct),
                Err(ScanError::Crossbar(CrossbarError::NotRepresentable)) => "  N/A ".to_string(),
                Err(e) => panic!("{e}"),
            };
            println!("demo {demo}: DPA {dpa}  PS {:6.2}%", ps.stats.mean_abs_error_pct);
        }
    }
}
