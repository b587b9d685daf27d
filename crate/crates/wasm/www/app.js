import init, { basisCurve, fitPanel, lambdaScan } from "./pkg/hpspline_wasm.js";

const COLORS = { hp: "#c0392b", ps: "#2874a6", truth: "#888", data: "#111" };
const $ = (id) => document.getElementById(id);

function plot(canvas, series, { logx = false, marker = null } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const tx = (x) => (logx ? Math.log10(x) : x);
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (const s of series) {
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (y === null || !isFinite(y)) return;
      x0 = Math.min(x0, tx(x)); x1 = Math.max(x1, tx(x));
      y0 = Math.min(y0, y); y1 = Math.max(y1, y);
    });
  }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#bbb";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText((logx ? "1e" : "") + x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText((logx ? "1e" : "") + x1.toPrecision(3), w - pad - 30, h - pad + 14);

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.points) {
      s.x.forEach((x, i) => ctx.fillRect(px(x) - 1.5, py(s.y[i]) - 1.5, 3, 3));
      continue;
    }
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (y === null || !isFinite(y)) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
  }
  if (marker) {
    ctx.strokeStyle = COLORS.hp;
    ctx.beginPath();
    ctx.moveTo(px(marker), pad);
    ctx.lineTo(px(marker), h - pad);
    ctx.stroke();
  }
}

function guard(target, f) {
  try {
    f();
  } catch (e) {
    target.textContent = "error: " + e;
  }
}

function drawBasis() {
  const alpha = +$("b-alpha").value, h = +$("b-h").value;
  $("b-alpha-v").value = alpha.toFixed(1);
  $("b-h-v").value = h.toFixed(2);
  guard($("f-report"), () => {
    const v = JSON.parse(basisCurve(alpha, h, 300));
    plot($("basis"), [
      { x: v.x, y: v.cubic, color: COLORS.ps },
      { x: v.x, y: v.hb, color: COLORS.hp },
    ]);
  });
}

const panelArgs = () => [+$("f-figure").value, +$("f-panel").value, BigInt($("f-seed").value || 0)];

function drawFit() {
  const alpha = +$("f-alpha").value, lambda = 10 ** +$("f-lambda").value;
  $("f-alpha-v").value = alpha.toFixed(2);
  $("f-lambda-v").value = lambda.toExponential(1);
  guard($("f-report"), () => {
    const v = JSON.parse(fitPanel(...panelArgs(), alpha, lambda));
    plot($("fit"), [
      { x: v.curve_x, y: v.truth, color: COLORS.truth },
      { x: v.curve_x, y: v.pspline, color: COLORS.ps },
      { x: v.curve_x, y: v.hp, color: COLORS.hp },
      { x: v.x, y: v.y, color: COLORS.data, points: true },
    ]);
    const r = v.report;
    $("f-report").textContent =
      `${v.function}, caption alpha ${v.caption_alpha}, sigma ${v.sigma}\n` +
      `rss ${r.rss.toExponential(3)}   max |residual| ${r.max_abs_residual.toExponential(3)}\n` +
      `moment discrepancies (relative) ${r.moment0_relative.toExponential(2)}, ${r.moment1_relative.toExponential(2)}`;
  });
}

let selected = null;

function drawScan() {
  const method = $("s-method").value;
  guard($("s-report"), () => {
    const v = JSON.parse(lambdaScan(...panelArgs(), +$("f-alpha").value, method));
    const y = method === "lcurve" ? v.score : v.score.map((s) => (s === null ? null : Math.log10(s)));
    plot($("scan"), [{ x: v.lambda, y, color: COLORS.ps }], { logx: true, marker: v.selected });
    selected = v.selected;
    const label = { gcv: "log10 GCV", lcurve: "curvature", discrepancy: "log10 RSS" }[method];
    $("s-report").textContent = `${label} against lambda; selected lambda = ${v.selected.toExponential(3)}`;
  });
}

function panelAlpha() {
  // panels 1-2 use caption alpha -1, panel 3 uses -0.5; the fit runs at -caption
  $("f-alpha").value = $("f-panel").value === "3" ? 0.5 : 1;
}

await init();
$("b-alpha").oninput = $("b-h").oninput = drawBasis;
$("f-alpha").oninput = () => { drawFit(); drawScan(); };
$("f-lambda").oninput = drawFit;
$("f-figure").onchange = $("f-panel").onchange = $("f-seed").onchange = () => { panelAlpha(); drawFit(); drawScan(); };
$("f-reset").onclick = () => { panelAlpha(); drawFit(); drawScan(); };
$("s-method").onchange = drawScan;
$("s-apply").onclick = () => {
  if (selected !== null) {
    $("f-lambda").value = Math.log10(selected);
    drawFit();
  }
};
drawBasis();
drawFit();
drawScan();
