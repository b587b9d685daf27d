use hpspline_wasm::demo::{basis_curve, fit_panel, lambda_scan};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn basis_curve_shapes() {
    let v = parse(basis_curve(2.0, 0.5, 101).unwrap());
    let hb = floats(&v["hb"]);
    let cubic = floats(&v["cubic"]);
    assert_eq!(hb.len(), 101);
    assert!(hb[0].abs() < 1e-12 && hb[100].abs() < 1e-12);
    // cubic B-spline peaks at 2/3 in the middle of its support
    assert!((cubic[50] - 2.0 / 3.0).abs() < 1e-12);
    assert!(hb.iter().all(|&y| y >= -1e-15));
    assert!(basis_curve(1.0, -1.0, 10).is_err());
    assert!(basis_curve(1.0, 1.0, 1).is_err());
}

#[test]
fn noise_free_panel_is_exact() {
    let v = parse(fit_panel(1, 1, 0, 1.0, 1.0).unwrap());
    assert!(v["report"]["max_abs_residual"].as_f64().unwrap() <= 1e-7);
    assert_eq!(floats(&v["hp"]).len(), 200);
    assert_eq!(v["caption_alpha"].as_f64().unwrap(), -1.0);
    assert!(fit_panel(1, 9, 0, 1.0, 1.0).is_err());
}

#[test]
fn scan_selects_from_the_grid() {
    let v = parse(lambda_scan(1, 2, 3, 1.0, "gcv").unwrap());
    let lambdas = floats(&v["lambda"]);
    let index = v["index"].as_u64().unwrap() as usize;
    assert_eq!(lambdas[index], v["selected"].as_f64().unwrap());
    let scores = floats(&v["score"]);
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(scores[index] <= best * (1.0 + 1e-9));

    let d = parse(lambda_scan(2, 3, 3, 0.5, "discrepancy").unwrap());
    assert!(d["selected"].as_f64().unwrap() > 0.0);
    let l = parse(lambda_scan(2, 3, 3, 0.5, "lcurve").unwrap());
    assert!(l["score"][0].is_null());
    assert!(lambda_scan(1, 2, 3, 1.0, "bogus").is_err());
}
