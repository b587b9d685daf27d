//! wasm-bindgen exports for the static page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(r: demo::DemoResult) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = basisCurve)]
pub fn basis_curve(alpha: f64, h: f64, points: usize) -> Result<String, JsValue> {
    js(demo::basis_curve(alpha, h, points))
}

#[wasm_bindgen(js_name = fitPanel)]
pub fn fit_panel(figure: u8, panel: u8, seed: u64, alpha: f64, lambda: f64) -> Result<String, JsValue> {
    js(demo::fit_panel(figure, panel, seed, alpha, lambda))
}

#[wasm_bindgen(js_name = lambdaScan)]
pub fn lambda_scan(figure: u8, panel: u8, seed: u64, alpha: f64, method: &str) -> Result<String, JsValue> {
    js(demo::lambda_scan(figure, panel, seed, alpha, method))
}
