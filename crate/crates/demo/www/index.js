import init, { objectiveMap, simulateTrial, fidelityCurve } from "./pkg/symest_demo.js";

const $ = (id) => document.getElementById(id);
const history = [];
let suggested = { theta: 0, phi: 0 };

function toPlane(x, y, z, w, h) {
  let phi = Math.atan2(y, x);
  if (phi < 0) phi += 2 * Math.PI;
  return [(phi / (2 * Math.PI)) * w, ((1 - z) / 2) * h];
}

function colour(t) {
  const r = Math.round(255 * Math.min(1, 2 * t));
  const b = Math.round(255 * Math.min(1, 2 * (1 - t)));
  return `rgb(${r},${Math.round(120 * (1 - Math.abs(2 * t - 1)))},${b})`;
}

function drawMap(map) {
  const cv = $("map");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const values = map.points.map((p) => p.value);
  const lo = Math.min(...values);
  const span = Math.max(...values) - lo || 1;
  for (const p of map.points) {
    const [px, py] = toPlane(p.point.x, p.point.y, p.point.z, cv.width, cv.height);
    ctx.fillStyle = colour((p.value - lo) / span);
    ctx.beginPath();
    ctx.arc(px, py, 9, 0, 2 * Math.PI);
    ctx.fill();
  }
  const b = map.best;
  const px = (b.phi / (2 * Math.PI)) * cv.width;
  const py = ((1 - Math.cos(b.theta)) / 2) * cv.height;
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 2;
  ctx.strokeRect(px - 8, py - 8, 16, 16);
  $("map-status").textContent =
    `objective range [${lo.toFixed(4)}, ${(lo + span).toFixed(4)}], best θ=${b.theta.toFixed(3)} φ=${b.phi.toFixed(3)}`;
}

function refreshMap() {
  $("map-status").textContent = "computing...";
  setTimeout(() => {
    const map = JSON.parse(objectiveMap(JSON.stringify(history), 512, 256));
    suggested = map.best;
    drawMap(map);
    $("history").textContent = history
      .map((h, i) => `${i + 1}. ${h.outcome}  θ=${h.theta.toFixed(3)} φ=${h.phi.toFixed(3)}`)
      .join("\n");
  }, 0);
}

function record(outcome) {
  history.push({ outcome, theta: suggested.theta, phi: suggested.phi });
  refreshMap();
}

function runTrial() {
  const json = simulateTrial(
    $("trial-strategy").value,
    Number($("trial-n").value),
    Number($("trial-seed").value),
    Number($("trial-index").value),
  );
  const view = JSON.parse(json);
  const cv = $("trial");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const w = 580;
  const n = view.steps.length;
  view.steps.forEach((s, i) => {
    const shade = 0.25 + 0.75 * ((i + 1) / n);
    let [x, y] = toPlane(s.reference.x, s.reference.y, s.reference.z, w, cv.height);
    ctx.fillStyle = `rgba(120,120,120,${shade})`;
    ctx.fillRect(x - 3, y - 3, 6, 6);
    [x, y] = toPlane(s.estimate.x, s.estimate.y, s.estimate.z, w, cv.height);
    ctx.fillStyle = `rgba(30,90,200,${shade})`;
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, 2 * Math.PI);
    ctx.fill();
  });
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0, 0, w, cv.height);
  const x0 = w + 20;
  const pw = cv.width - x0 - 10;
  ctx.strokeRect(x0, 0, pw, cv.height);
  ctx.strokeStyle = "#1e5ac8";
  ctx.beginPath();
  view.steps.forEach((s, i) => {
    const x = x0 + (n > 1 ? (i / (n - 1)) * pw : pw / 2);
    const y = (1 - s.fidelity) * cv.height;
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function plotCurve(ctx, rows, w, h, style, dashed) {
  const yOf = (f) => h - ((f - 0.5) / 0.5) * h;
  ctx.strokeStyle = style;
  ctx.setLineDash(dashed ? [6, 4] : []);
  ctx.beginPath();
  rows.forEach((r, i) => {
    const x = 30 + (rows.length > 1 ? (i / (rows.length - 1)) * (w - 40) : 0);
    const f = dashed ? r.optimal_bound : r.mean_fidelity;
    i === 0 ? ctx.moveTo(x, yOf(f)) : ctx.lineTo(x, yOf(f));
  });
  ctx.stroke();
  ctx.setLineDash([]);
}

function runCurve() {
  $("curve-status").textContent = "running...";
  setTimeout(() => {
    const args = [Number($("curve-n").value), Number($("curve-trials").value), Number($("curve-seed").value)];
    const t0 = performance.now();
    const adaptive = JSON.parse(fidelityCurve("adaptive", ...args));
    const random = JSON.parse(fidelityCurve("random", ...args));
    const cv = $("curve");
    const ctx = cv.getContext("2d");
    ctx.clearRect(0, 0, cv.width, cv.height);
    ctx.lineWidth = 2;
    plotCurve(ctx, adaptive, cv.width, cv.height, "#1e5ac8", false);
    plotCurve(ctx, random, cv.width, cv.height, "#e08a1e", false);
    plotCurve(ctx, adaptive, cv.width, cv.height, "#444", true);
    const last = adaptive.length - 1;
    $("curve-status").textContent =
      `N=${adaptive[last].n}: adaptive ${adaptive[last].mean_fidelity.toFixed(4)}, ` +
      `random ${random[last].mean_fidelity.toFixed(4)} (${((performance.now() - t0) / 1000).toFixed(1)} s)`;
  }, 0);
}

function guarded(f) {
  return () => {
    try {
      f();
    } catch (e) {
      alert(e);
    }
  };
}

await init();
$("rec-s").onclick = guarded(() => record("s"));
$("rec-a").onclick = guarded(() => record("a"));
$("undo").onclick = guarded(() => { history.pop(); refreshMap(); });
$("clear").onclick = guarded(() => { history.length = 0; refreshMap(); });
$("trial-run").onclick = guarded(runTrial);
$("curve-run").onclick = guarded(runCurve);
refreshMap();
runTrial();
