import init, { bound_curve, gamma_profile, simulate } from "./pkg/syncap_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];

function plot(canvas, xs, series, xLabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ys = series.flatMap((s) => s.values).filter(Number.isFinite);
  const lo = Math.min(0, ...ys);
  const hi = Math.max(1, ...ys);
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, py(hi));
  ctx.lineTo(pad, py(lo));
  ctx.lineTo(w - pad, py(lo));
  ctx.stroke();
  if (lo < 0) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(pad, py(0));
    ctx.lineTo(w - pad, py(0));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  for (const y of [lo, 0, hi]) ctx.fillText(y.toFixed(2), 4, py(y) + 4);
  ctx.fillText(x0.toFixed(2), px(x0) - 8, h - pad + 14);
  ctx.fillText(x1.toFixed(2), px(x1) - 8, h - pad + 14);
  ctx.fillText(xLabel, w / 2, h - 8);

  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.values.forEach((y, j) => (j ? ctx.lineTo(px(xs[j]), py(y)) : ctx.moveTo(px(xs[j]), py(y))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(s.name, w - pad - 90, pad + 14 * k);
  });
  ctx.lineWidth = 1;
}

function guarded(msgId, f) {
  return () => {
    const msg = $(msgId);
    msg.className = "";
    msg.textContent = "computing…";
    // let the message paint before the synchronous wasm call
    setTimeout(() => {
      try {
        msg.textContent = f() ?? "";
      } catch (e) {
        msg.className = "err";
        msg.textContent = String(e.message ?? e);
      }
    }, 0);
  };
}

function drawCurve() {
  const pts = JSON.parse(bound_curve($("curve-channel").value, num("curve-alpha"), num("curve-max"), num("curve-points")));
  const names = pts[0].bounds.map(([name]) => name);
  const series = names.map((name, k) => ({ name, values: pts.map((p) => p.bounds[k][1]) }));
  plot($("curve"), pts.map((p) => p.rate), series, "rate");
  const last = pts[pts.length - 1];
  return `at rate ${last.rate.toFixed(3)}: bound ${last.bound.toFixed(5)} bits/use, gamma* ${last.gamma_star.toFixed(4)}`;
}

function drawProfile() {
  const pts = JSON.parse(gamma_profile($("prof-channel").value, num("prof-d"), num("prof-i"), num("prof-alpha"), 99));
  const names = pts[0].bounds.map(([name]) => name);
  const series = names.map((name, k) => ({ name, values: pts.map((p) => p.bounds[k][1]) }));
  plot($("profile"), pts.map((p) => p.gamma), series, "gamma");
  const best = pts.reduce((a, p) => (Math.max(...p.bounds.map((b) => b[1])) > Math.max(...a.bounds.map((b) => b[1])) ? p : a));
  return `grid maximum near gamma = ${best.gamma.toFixed(2)}`;
}

function runSimulation() {
  const r = JSON.parse(simulate(num("sim-d"), num("sim-i"), num("sim-alpha"), num("sim-gamma"), num("sim-n"), num("sim-seed")));
  $("sim-out").textContent = [
    `x       ${r.x}`,
    `y       ${r.y}`,
    `I       ${r.inserted.join("")}`,
    `T       ${r.complementary.join("")}`,
    `y~      ${r.y_tilde}`,
    `S       ${r.deleted_runs.join(",")}`,
    `${r.deletions} deleted, ${r.insertions} inserted`,
  ].join("\n");
}

await init();
$("curve-go").onclick = guarded("curve-msg", drawCurve);
$("prof-go").onclick = guarded("prof-msg", drawProfile);
$("sim-go").onclick = () => {
  try {
    runSimulation();
  } catch (e) {
    $("sim-out").textContent = String(e.message ?? e);
  }
};
$("curve-go").click();
$("prof-go").click();
runSimulation();
