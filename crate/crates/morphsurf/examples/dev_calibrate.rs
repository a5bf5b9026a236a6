use morphsurf::crossbar::*;

fn main() {
    let template = CrossbarConfig {
        blocker_factor: calibrated::BLOCKER_FACTOR,
        ..CrossbarConfig::default()
    };
    let r = calibrate_r_segment(&template, calibrated::FAR_ATTENUATION).unwrap();
    println!("r_segment = {:.16e}", r);
    let cfg = CrossbarConfig { r_segment: r, ..template };
    let net = build_network(&cfg).unwrap();
    let att = attenuation_map(&net, 1.0).unwrap();
    println!("far corner attenuation = {:.6}", att[(5, 5)]);
    println!("near corner attenuation = {:.6}", att[(0, 0)]);
}
