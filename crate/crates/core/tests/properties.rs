use chromadiff::diffusion::{coupling_terms, tensor_step};
use chromadiff::fdcalc::{gaussian_convolve, gaussian_kernel, gradient, gradient_magnitude, hessian, laplacian};
use chromadiff::metrics::{psnr_from_mse, ssim_map};
use chromadiff::structure::{diffusion_tensor, eigen_sym2, f_minus, f_plus};
use chromadiff::tv::{compute_weights, WeightField};
use chromadiff::*;
use proptest::prelude::*;

fn field(max: usize) -> impl Strategy<Value = ScalarField> {
    (3..=max, 3..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(-1.0f64..1.0, w * h).prop_map(move |v| ScalarField::from_vec(w, h, v).unwrap())
    })
}

fn image(max: usize) -> impl Strategy<Value = PlanarImage> {
    (3..=max, 3..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..1.0, 3 * w * h).prop_map(move |v| {
            PlanarImage::from_fn(w, h, |c, x, y| v[(c * h + y) * w + x]).unwrap()
        })
    })
}

fn close(a: &ScalarField, b: &ScalarField, tol: f64) -> bool {
    a.same_shape(b) && a.data().iter().zip(b.data()).all(|(x, y)| (x - y).abs() <= tol)
}

fn close_img(a: &PlanarImage, b: &PlanarImage, tol: f64) -> bool {
    a.same_shape(b) && a.planes().iter().zip(b.planes()).all(|(p, q)| close(p, q, tol))
}

fn neg(f: &ScalarField) -> ScalarField {
    f.map(|v| -v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stencils_are_linear(f in field(12), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = f.map(|v| (3.0 * v).sin());
        let combo = f.zip_map(&g, |p, q| a * p + b * q);
        let lin = |x: &ScalarField, y: &ScalarField| x.zip_map(y, |p, q| a * p + b * q);

        prop_assert!(close(&laplacian(&combo), &lin(&laplacian(&f), &laplacian(&g)), 1e-9));
        let (cx, cy) = gradient(&combo);
        let ((fx, fy), (gx, gy)) = (gradient(&f), gradient(&g));
        prop_assert!(close(&cx, &lin(&fx, &gx), 1e-9));
        prop_assert!(close(&cy, &lin(&fy, &gy), 1e-9));
        let (hc, hf, hg) = (hessian(&combo), hessian(&f), hessian(&g));
        prop_assert!(close(&hc.xy, &lin(&hf.xy, &hg.xy), 1e-9));
    }

    #[test]
    fn stencils_commute_with_quarter_turns(f in field(12), sigma in 0.0f64..3.0) {
        let r = f.rotate90();
        let (fx, fy) = gradient(&f);
        let (rx, ry) = gradient(&r);
        prop_assert!(close(&rx, &fy.rotate90(), 1e-12));
        prop_assert!(close(&ry, &neg(&fx.rotate90()), 1e-12));

        let (hf, hr) = (hessian(&f), hessian(&r));
        prop_assert!(close(&hr.xx, &hf.yy.rotate90(), 1e-12));
        prop_assert!(close(&hr.yy, &hf.xx.rotate90(), 1e-12));
        prop_assert!(close(&hr.xy, &neg(&hf.xy.rotate90()), 1e-12));

        prop_assert!(close(&laplacian(&r), &laplacian(&f).rotate90(), 1e-12));
        let blurred = gaussian_convolve(&f, sigma).unwrap();
        prop_assert!(close(&gaussian_convolve(&r, sigma).unwrap(), &blurred.rotate90(), 1e-12));
    }

    #[test]
    fn gaussian_kernel_is_normalized(sigma in 0.0f64..10.0) {
        let k = gaussian_kernel(sigma).unwrap();
        prop_assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(k.len() % 2, 1);
        let n = k.len();
        for i in 0..n / 2 {
            prop_assert_eq!(k[i], k[n - 1 - i]);
        }
    }

    #[test]
    fn laplacian_conserves_mass(f in field(16)) {
        // whole-sample reflection conserves the trapezoid-weighted sum
        let lap = laplacian(&f);
        let (w, h) = (f.width(), f.height());
        let edge = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let mut total = 0.0;
        for y in 0..h {
            for x in 0..w {
                total += edge(x, w) * edge(y, h) * lap.get(x, y);
            }
        }
        prop_assert!(total.abs() < 1e-9);
    }

    #[test]
    fn symmetric_eigen_pairs(xx in 0.0f64..4.0, yy in 0.0f64..4.0, t in -1.0f64..1.0) {
        // keep the matrix positive semidefinite, like a structure tensor
        let xy = t * (xx * yy).sqrt();
        let e = eigen_sym2(xx, xy, yy);
        prop_assert!(e.lambda_plus >= e.lambda_minus && e.lambda_minus >= 0.0);
        prop_assert!((e.lambda_plus + e.lambda_minus - (xx + yy)).abs() < 1e-9);
        let [px, py] = e.theta_plus;
        let [mx, my] = e.theta_minus;
        prop_assert!((px.hypot(py) - 1.0).abs() < 1e-12);
        prop_assert!((px * mx + py * my).abs() < 1e-12);
        let residual = (xx * px + xy * py - e.lambda_plus * px).hypot(xy * px + yy * py - e.lambda_plus * py);
        prop_assert!(residual < 1e-9);
    }

    #[test]
    fn tensor_spectrum_follows_edge_strength(img in image(10)) {
        let (s, t) = diffusion_tensor(&img, 1.0).unwrap();
        for i in 0..s.edge.len() {
            let [a, b, c] = t.0.at(i);
            let e = eigen_sym2(a, b, c);
            let n = s.edge.data()[i];
            prop_assert!((e.lambda_plus - f_minus(n)).abs() < 1e-9);
            prop_assert!((e.lambda_minus - f_plus(n)).abs() < 1e-9);
            prop_assert!(e.lambda_minus > 0.0 && e.lambda_plus <= 1.0);
        }
    }

    #[test]
    fn tensor_ignores_sign(img in image(10)) {
        let (_, t) = diffusion_tensor(&img, 2.0).unwrap();
        let (_, tn) = diffusion_tensor(&img.map(|v| -v), 2.0).unwrap();
        prop_assert_eq!(t, tn);
    }

    #[test]
    fn coupling_sums_to_zero(img in image(10), raw in prop::collection::vec(0.0f64..1.0, 3)) {
        let (w, h) = (img.width(), img.height());
        let total: f64 = raw.iter().sum::<f64>().max(1e-6);
        let weights = WeightField {
            weights: [0, 1, 2].map(|c| ScalarField::filled(w, h, raw[c] / total)),
        };
        let f = coupling_terms(&img, &weights).unwrap();
        for p in 0..w * h {
            prop_assert!((f[0].data()[p] + f[1].data()[p] + f[2].data()[p]).abs() < 1e-9);
        }
    }

    #[test]
    fn weights_lie_on_simplex_and_ignore_scale(img in image(12), rho in 0.0f64..3.0, scale in 0.1f64..10.0) {
        let w = compute_weights(&img, rho).unwrap();
        let ws = compute_weights(&img.map(|v| scale * v), rho).unwrap();
        // scale invariance holds away from the fallback floor
        let mass = img
            .planes()
            .iter()
            .map(|p| gaussian_convolve(&gradient_magnitude(p), rho).unwrap())
            .reduce(|a, b| a.zip_map(&b, |x, y| x + y))
            .unwrap();
        for p in 0..img.width() * img.height() {
            let a = w.at(p);
            prop_assert!(a.iter().all(|&v| v >= 0.0));
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            if mass.data()[p] < 1e-9 {
                continue;
            }
            let b = ws.at(p);
            for c in 0..3 {
                prop_assert!((a[c] - b[c]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ssim_is_symmetric_and_bounded((a, b) in field(14).prop_flat_map(|a| {
        let (w, h) = (a.width(), a.height());
        (Just(a), prop::collection::vec(-1.0f64..1.0, w * h).prop_map(move |v| ScalarField::from_vec(w, h, v).unwrap()))
    })) {
        let ab = ssim_map(&a, &b).unwrap();
        let ba = ssim_map(&b, &a).unwrap();
        prop_assert!(close(&ab, &ba, 1e-9));
        prop_assert!(ab.data().iter().all(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v)));
        prop_assert!(ssim_map(&a, &a).unwrap().data().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn psnr_and_mse_round_trip(m in 1e-8f64..3.0) {
        let p = psnr_from_mse(m);
        prop_assert!((3.0 * 10f64.powf(-p / 10.0) - m).abs() <= 1e-9 * m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn denoising_is_odd(img in image(10), kind in prop::sample::select(SchemeKind::ALL.to_vec())) {
        let cfg = DiffusionConfig { iterations: 3, tv: TvConfig { iterations: 5, ..TvConfig::default() }, ..DiffusionConfig::default() };
        let a = denoise(&img, &cfg, kind).unwrap();
        let b = denoise(&img.map(|v| -v), &cfg, kind).unwrap();
        prop_assert!(close_img(&a.map(|v| -v), &b, 1e-9));
    }

    #[test]
    fn denoising_commutes_with_channel_order(img in image(10), kind in prop::sample::select(SchemeKind::ALL.to_vec())) {
        let order = [2, 0, 1];
        let cfg = DiffusionConfig { iterations: 3, tv: TvConfig { iterations: 5, ..TvConfig::default() }, ..DiffusionConfig::default() };
        let a = denoise(&img, &cfg, kind).unwrap().permute_channels(order);
        let b = denoise(&img.permute_channels(order), &cfg, kind).unwrap();
        prop_assert!(close_img(&a, &b, 1e-9));
    }

    #[test]
    fn one_coupled_step_commutes_with_quarter_turns(img in image(12)) {
        let cfg = DiffusionConfig::default();
        let w = compute_weights(&img, 2.0).unwrap();
        let wr = compute_weights(&img.rotate90(), 2.0).unwrap();
        let a = tensor_step(&img, &cfg, Some((&w, cfg.coupling_gain))).unwrap().rotate90();
        let b = tensor_step(&img.rotate90(), &cfg, Some((&wr, cfg.coupling_gain))).unwrap();
        prop_assert!(close_img(&a, &b, 1e-9));
    }

    #[test]
    fn noise_is_reproducible_and_calibrated(seed in any::<u64>()) {
        let clean = PlanarImage::from_fn(64, 64, |c, x, y| ((c + x + y) % 4) as f64 / 4.0).unwrap();
        let a = add_gaussian_noise(&clean, 20.0, seed).unwrap();
        prop_assert_eq!(&a, &add_gaussian_noise(&clean, 20.0, seed).unwrap());
        let diffs: Vec<f64> = a
            .planes()
            .iter()
            .zip(clean.planes())
            .flat_map(|(p, q)| p.data().iter().zip(q.data()).map(|(x, y)| x - y).collect::<Vec<_>>())
            .collect();
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        let target = (20.0f64 / 255.0).powi(2);
        // 12288 samples: the variance estimate has relative sd sqrt(2/n) ~ 1.3%
        prop_assert!((var / target - 1.0).abs() < 0.06);
        prop_assert!(mean.abs() < 6.0 * (target / n).sqrt());
    }
}
