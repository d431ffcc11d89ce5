// temporary probe
use crossing_core::*;

fn packet(center: f64, momentum: f64, sigma: f64, half_width: f64, n: usize) -> WaveFunction {
    let grid = Grid1D::symmetric(half_width, n).unwrap();
    let params = PhysParams::natural(0.5, 1.0, 1.0).unwrap();
    let spec = GaussianPacketSpec::new(center, momentum, sigma).unwrap();
    make_gaussian(&spec, &grid, &params).unwrap()
}

fn main() {
    println!("== grid refinement, packet (1, -1, 0.8) tau=0.7 on [-25,25] ==");
    for n in [1024usize, 2048, 4096, 8192] {
        let psi = packet(1.0, -1.0, 0.8, 25.0, n);
        let r = crossing_decoherence(&psi, 0.7).unwrap();
        println!(
            "n={n:5}  p_nocross={:.10}  p_cross={:.10}  re_d={:.10}  abs_d={:.10}",
            r.p_nocross, r.p_cross, r.re_d, r.abs_d
        );
    }
    println!("== straddling at-rest packet (0,0,1), tau=1, n=2048 [-25,25] ==");
    for n in [2048usize, 4096] {
        let psi = packet(0.0, 0.0, 1.0, 25.0, n);
        let r = crossing_decoherence(&psi, 1.0).unwrap();
        println!(
            "n={n}: re_d={:.8} abs_d={:.8} p_c={:.8} p_nc={:.8} ratio={:?}",
            r.re_d, r.abs_d, r.p_cross, r.p_nocross, r.consistency_ratio
        );
    }
    println!("== detector gamma_d sweep, packet (5,-5,0.5) tau=2 ==");
    let psi = packet(5.0, -5.0, 0.5, 40.0, 2048);
    for gamma_d in [0.1, 1.0, 10.0, 100.0] {
        let det = DetectorParams::for_duration(gamma_d, 2.0, 2000).unwrap();
        let probs = detection_probabilities(&psi, &det).unwrap();
        println!("gamma_d={gamma_d:7}: p_d={:.8}", probs.p_d);
    }
    println!("== small-time scaling, packet (1,-1,0.5) on [-8,8] n=8192 ==");
    let psi = packet(1.0, -1.0, 0.5, 8.0, 8192);
    let taus: Vec<f64> = (0..9).map(|i| 1e-4 * 10f64.powf(i as f64 / 4.0)).collect();
    for &t in &taus {
        let r = crossing_decoherence(&psi, t).unwrap();
        println!("tau={t:.6e}  p_cross={:.6e}  |re_d|={:.6e}  p_nc={:.8}", r.p_cross, r.re_d.abs(), r.p_nocross);
    }
    match small_time_scaling(&psi, &taus) {
        Ok(fit) => println!(
            "fit: q_pc={:.4} q_red={:.4} p_nc(min)={:.6} used={}",
            fit.p_cross_exponent, fit.re_d_exponent, fit.p_nocross_at_min_tau, fit.points_used
        ),
        Err(e) => println!("fit error: {e}"),
    }
}
