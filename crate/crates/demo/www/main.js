import init, { samplePlanted, compareSpectra, minhashTrials, simhashTrials } from "./pkg/codicil_demo.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
const $ = (sel) => document.querySelector(sel);

function showValues() {
  for (const input of document.querySelectorAll("input[type=range]")) {
    const out = input.parentElement.querySelector("output");
    if (out) out.textContent = input.value;
  }
}

function request() {
  const req = {};
  for (const el of document.querySelectorAll("#graph-params [name], #sample-params [name]")) {
    req[el.name] = el.tagName === "SELECT" ? el.value : Number(el.value);
  }
  return req;
}

function layout(n, truth, communities) {
  // Communities on a ring, members on a small disc around each centre.
  const pos = new Array(n);
  const members = Array.from({ length: communities }, () => []);
  truth.forEach((c, v) => members[c].push(v));
  const R = 190, r = communities > 1 ? Math.min(95, 420 / communities) : 200;
  members.forEach((vs, c) => {
    const a = (2 * Math.PI * c) / communities - Math.PI / 2;
    const cx = 280 + (communities > 1 ? R * Math.cos(a) : 0);
    const cy = 280 + (communities > 1 ? R * Math.sin(a) : 0);
    vs.forEach((v, i) => {
      const t = i * 2.399963;
      const d = r * Math.sqrt((i + 0.5) / vs.length);
      pos[v] = [cx + d * Math.cos(t), cy + d * Math.sin(t)];
    });
  });
  return pos;
}

function drawGraph(res, communities) {
  const ctx = $("#graph").getContext("2d");
  ctx.clearRect(0, 0, 560, 560);
  const pos = layout(res.vertex_count, res.truth, communities);
  const line = ([u, v], style, width) => {
    ctx.strokeStyle = style;
    ctx.lineWidth = width;
    ctx.beginPath();
    ctx.moveTo(...pos[u]);
    ctx.lineTo(...pos[v]);
    ctx.stroke();
  };
  if ($("#show-removed").checked) {
    for (const e of res.topological) line(e, "rgba(0,0,0,0.06)", 1);
    for (const e of res.content) line(e, "rgba(255,140,0,0.12)", 1);
  }
  const intra = ([u, v]) => res.clusters[u] === res.clusters[v];
  for (const e of res.sampled) line(e, intra(e) ? "rgba(40,40,40,0.45)" : "rgba(220,0,0,0.8)", 1);
  for (let v = 0; v < res.vertex_count; v++) {
    ctx.fillStyle = PALETTE[res.clusters[v] % PALETTE.length];
    ctx.beginPath();
    ctx.arc(...pos[v], 4, 0, 2 * Math.PI);
    ctx.fill();
    if (res.clusters[v] !== res.truth[v]) {
      ctx.strokeStyle = "#000";
      ctx.lineWidth = 0.5;
      ctx.stroke();
    }
  }
  $("#stats").textContent =
    `vertices        ${res.vertex_count}\n` +
    `topological     ${res.topological.length}\n` +
    `content         ${res.content.length}\n` +
    `sampled         ${res.sampled.length}\n` +
    `clusters        ${res.cluster_count}\n` +
    `F-score         ${res.fscore.toFixed(4)}\n\n` +
    `fill colour = found cluster\nred edges cross clusters`;
}

function drawSpectrum(res) {
  const ctx = $("#spectrum").getContext("2d");
  const W = 560, H = 260, pad = 30;
  ctx.clearRect(0, 0, W, H);
  const max = Math.max(...res.original, ...res.sampled, 1e-9);
  const n = res.original.length;
  const x = (i) => pad + ((W - 2 * pad) * i) / Math.max(1, n - 1);
  const y = (v) => H - pad - ((H - 2 * pad) * v) / max;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, H - pad);
  ctx.lineTo(W - pad, H - pad);
  ctx.stroke();
  for (const [vals, colour] of [[res.original, "#1f77b4"], [res.sampled, "#d62728"]]) {
    ctx.fillStyle = colour;
    vals.forEach((v, i) => ctx.fillRect(x(i) - 2, y(Math.max(0, v)) - 2, 4, 4));
  }
  $("#spectrum-stats").textContent =
    `blue: topology, ${res.original_components} zero eigenvalue(s)\n` +
    `red:  sampled,  ${res.sampled_components} zero eigenvalue(s)\n` +
    `largest shown   ${max.toFixed(3)}`;
}

function drawEstimators(mh, sh) {
  const ctx = $("#estimators").getContext("2d");
  const W = 560, H = 220;
  ctx.clearRect(0, 0, W, H);
  const strip = (pt, top, lo, hi, label) => {
    const sx = (v) => 20 + ((W - 40) * (v - lo)) / (hi - lo);
    ctx.fillStyle = "#333";
    ctx.fillText(label, 20, top - 8);
    ctx.fillStyle = "rgba(31,119,180,0.35)";
    for (const e of pt.estimates) ctx.fillRect(sx(e) - 1, top, 2, 40);
    ctx.fillStyle = "#000";
    ctx.fillRect(sx(pt.exact) - 1, top - 4, 2, 48);
    ctx.fillStyle = "#d62728";
    ctx.fillRect(sx(pt.mean) - 1, top - 4, 2, 48);
  };
  strip(mh, 40, 0, 1, "minhash jaccard estimates (black = exact, red = mean)");
  strip(sh, 140, -1, 1, "simhash cosine estimates (black = exact, red = mean)");
  $("#estimator-stats").textContent =
    `jaccard exact ${mh.exact.toFixed(4)}  mean ${mh.mean.toFixed(4)}\n` +
    `cosine  exact ${sh.exact.toFixed(4)}  mean ${sh.mean.toFixed(4)}`;
}

function guard(target, f) {
  try {
    f();
  } catch (e) {
    $(target).innerHTML = `<span class="error">${e.message ?? e}</span>`;
  }
}

function refreshGraph() {
  const req = request();
  guard("#stats", () => drawGraph(JSON.parse(samplePlanted(JSON.stringify(req))), req.communities));
  guard("#spectrum-stats", () => drawSpectrum(JSON.parse(compareSpectra(JSON.stringify(req), 30))));
}

function refreshEstimators() {
  guard("#estimator-stats", () => {
    const mh = JSON.parse(minhashTrials(Number($("#overlap").value), Number($("#hashes").value), 100));
    const sh = JSON.parse(simhashTrials(Number($("#angle").value), Number($("#bits").value), 50));
    drawEstimators(mh, sh);
  });
}

await init();
showValues();
for (const el of document.querySelectorAll("#graph-params *, #sample-params *")) {
  el.addEventListener("input", () => { showValues(); refreshGraph(); });
}
for (const id of ["#overlap", "#hashes", "#angle", "#bits"]) {
  $(id).addEventListener("input", () => { showValues(); refreshEstimators(); });
}
refreshGraph();
refreshEstimators();
