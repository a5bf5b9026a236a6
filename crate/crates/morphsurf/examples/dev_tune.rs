use morphsurf::crossbar::*;
use morphsurf::scanner::*;

fn table(g_leak: f64) {
    let template = CrossbarConfig {
        g_leak,
        blocker_factor: calibrated::BLOCKER_FACTOR,
        ..CrossbarConfig::default()
    };
    let r_seg = calibrate_r_segment(&template, calibrated::FAR_ATTENUATION).unwrap();
    println!("=== g_leak {g_leak}, calibrated r_segment {r_seg:.6e} ===");
    let dyn_cfg = PixelDynamicsConfig::default();
    let mut ps4 = [0.0f64; 2];
    for (k, bf) in [1.0, calibrated::BLOCKER_FACTOR].iter().enumerate() {
        let net = build_network(&CrossbarConfig {
            g_leak,
            r_segment: r_seg,
            blocker_factor: *bf,
            ..CrossbarConfig::default()
        })
        .unwrap();
        print!("bf {bf}: ");
        for demo in 1..=4 {
            let target = demo_target(demo, 6);
            let opts = ScanOptions::default();
            let ps = scan_target(&net, &target, Protocol::Ps, &dyn_cfg, &opts).unwrap();
            let dpa = match scan_target(&net, &target, Protocol::Dpa, &dyn_cfg, &opts) {
                Ok(out) => format!("{:5.2}", out.stats.mean_abs_error_pct),
                Err(_) => " N/A ".to_string(),
            };
            print!("d{demo}[DPA {dpa} PS {:5.2}] ", ps.stats.mean_abs_error_pct);
            if demo == 4 {
                ps4[k] = ps.stats.mean_abs_error_pct;
            }
        }
        println!();
    }
    println!(
        "demo4 PS reduction: {:.1}%  (need >= 30%)",
        100.0 * (ps4[0] - ps4[1]) / ps4[0]
    );
}

fn main() {
    for g in [0.35, 0.8, 1.5, 3.0] {
        table(g);
    }
}
