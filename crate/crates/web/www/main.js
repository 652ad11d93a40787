import init, { lemma, classify_family, positivity_sweep } from "./pkg/wignerkit_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  return ctx;
}

function showError(canvas, err) {
  const ctx = clear(canvas);
  ctx.fillStyle = "#b42318";
  ctx.fillText(String(err), 12, 24);
}

function drawSweep() {
  const canvas = $("sw-canvas");
  let data;
  try {
    data = JSON.parse(positivity_sweep(num("sw-n"), num("sw-mu"), num("sw-steps"), 0));
  } catch (e) {
    return showError(canvas, e);
  }
  const ctx = clear(canvas);
  const pad = 40;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const pts = data.points;
  const muMax = pts[pts.length - 1].mu;
  const ys = pts.flatMap((p) => [p.min_value, p.closed_form]);
  const yMin = Math.min(0, ...ys);
  const yMax = Math.max(0, ...ys);
  const x = (mu) => pad + (mu / muMax) * w;
  const y = (v) => pad + (1 - (v - yMin) / (yMax - yMin || 1)) * h;

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, y(0));
  ctx.lineTo(pad + w, y(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("0", 8, y(0) + 4);
  ctx.fillText(`mu = ${muMax}`, pad + w - 50, canvas.height - 10);
  ctx.fillText(yMax.toFixed(3), 4, pad);
  ctx.fillText(yMin.toFixed(3), 4, pad + h);

  if (data.threshold <= muMax) {
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#b42318";
    ctx.beginPath();
    ctx.moveTo(x(data.threshold), pad);
    ctx.lineTo(x(data.threshold), pad + h);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.strokeStyle = "#1f6feb";
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo(x(p.mu), y(p.closed_form)) : ctx.moveTo(x(p.mu), y(p.closed_form))));
  ctx.stroke();

  for (const p of pts) {
    ctx.fillStyle = p.min_value >= -1e-9 ? "#1a7f37" : "#b42318";
    ctx.beginPath();
    ctx.arc(x(p.mu), y(p.min_value), 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawHeatmap(ctx, matrix, left, top, size) {
  const n = matrix.n;
  const cell = size / n;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const [re, im] = matrix.data[i][j];
      const mag = Math.min(1, Math.hypot(re, im));
      const shade = Math.round(255 * (1 - mag));
      ctx.fillStyle = `rgb(${shade}, ${shade}, 255)`;
      ctx.fillRect(left + j * cell, top + i * cell, cell, cell);
    }
  }
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(left, top, size, size);
}

function drawLemma() {
  const canvas = $("lm-canvas");
  const seedText = $("lm-seed").value.trim();
  let d;
  try {
    d = JSON.parse(lemma(num("lm-n"), num("lm-k"), seedText === "" ? undefined : Number(seedText), num("lm-which")));
  } catch (e) {
    $("lm-summary").textContent = "";
    return showError(canvas, e);
  }
  $("lm-summary").textContent =
    `basis columns ${d.indices.join(", ")}; residual ${d.residual.toExponential(2)}; ` +
    `max commutator ${d.max_commutator.toExponential(2)}`;
  const mats = [d.p, ...d.projections];
  const ctx = clear(canvas);
  const gap = 14;
  const size = Math.min(150, (canvas.width - gap * (mats.length + 1)) / mats.length);
  mats.forEach((m, idx) => {
    const left = gap + idx * (size + gap);
    drawHeatmap(ctx, m, left, 24, size);
    ctx.fillStyle = "#333";
    ctx.fillText(idx === 0 ? "p" : `P${idx}`, left, 16);
  });
}

function classifySpec() {
  const family = $("cl-family").value;
  const param = num("cl-param");
  const params = {};
  if (family === "wigner" || family === "perturbed_wigner") params.variant = $("cl-variant").value;
  if (family === "perturbed_wigner") params.epsilon = param;
  if (family === "depolarizing") params.lambda = param;
  if (family === "pseudo_depolarizing") params.mu = param;
  return JSON.stringify({ family, n: num("cl-n"), params, seed: num("cl-seed") });
}

function drawClassify() {
  const canvas = $("cl-canvas");
  let r;
  try {
    r = JSON.parse(classify_family(classifySpec(), num("cl-k"), undefined));
  } catch (e) {
    $("cl-verdict").textContent = "";
    $("cl-json").textContent = "";
    return showError(canvas, e);
  }
  const ok = r.verdict === "wigner";
  $("cl-verdict").innerHTML = ok
    ? `<span class="ok">Wigner form (${r.variant})</span>, residual ${r.residual.toExponential(2)}`
    : `<span class="bad">not Wigner</span>: ${r.reasons.join(", ")}`;
  $("cl-json").textContent = JSON.stringify(r, null, 2);

  const ctx = clear(canvas);
  const spec = r.choi_spectrum;
  const pad = 30;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const lo = Math.min(0, ...spec);
  const hi = Math.max(0, ...spec);
  const y = (v) => pad + (1 - (v - lo) / (hi - lo || 1)) * h;
  const bar = w / spec.length;
  spec.forEach((v, i) => {
    ctx.fillStyle = v < -1e-9 ? "#b42318" : "#1f6feb";
    const top = Math.min(y(v), y(0));
    ctx.fillRect(pad + i * bar + 1, top, Math.max(1, bar - 2), Math.abs(y(v) - y(0)));
  });
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, y(0));
  ctx.lineTo(pad + w, y(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toFixed(2), 2, pad);
  ctx.fillText(lo.toFixed(2), 2, pad + h);
}

await init();
$("sw-run").onclick = drawSweep;
$("lm-run").onclick = drawLemma;
$("cl-run").onclick = drawClassify;
drawSweep();
drawLemma();
drawClassify();
