import init, { groups, components, geodesic, area, verify } from "./pkg/rhgt_wasm.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, text) {
  const ns = ["svg", "line", "path", "circle", "text"].includes(tag) ? "http://www.w3.org/2000/svg" : null;
  const e = ns ? document.createElementNS(ns, tag) : document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  if (text !== undefined) e.textContent = text;
  return e;
}

// Vertices on a line; X-edges straight, subgroup edges as arcs coloured by
// coset class. Isolated components are dashed.
function drawPath(report) {
  const { letters, vertices } = report.path;
  const step = 90, w = Math.max(200, step * letters.length + 60), h = 170, y = 120;
  const svg = el("svg", { width: w, height: h });
  const x = (i) => 30 + i * step;
  const colour = {}, dashed = {};
  report.classes.forEach((cls, ci) => cls.forEach((k) => (colour[k] = PALETTE[ci % PALETTE.length])));
  report.isolated.forEach((iso, k) => (dashed[k] = iso));
  const compAt = {};
  report.components.forEach((c, k) => {
    for (let i = c.letters[0]; i < c.letters[1]; i++) compAt[i] = k;
  });
  letters.forEach((l, i) => {
    const k = compAt[i];
    if (k === undefined) {
      svg.append(el("line", { x1: x(i), y1: y, x2: x(i + 1), y2: y, stroke: "#444", "stroke-width": 2 }));
    } else {
      const mid = (x(i) + x(i + 1)) / 2;
      svg.append(el("path", {
        d: `M ${x(i)} ${y} Q ${mid} ${y - 70} ${x(i + 1)} ${y}`,
        fill: "none", stroke: colour[k], "stroke-width": 3,
        "stroke-dasharray": dashed[k] ? "6 4" : "none",
      }));
    }
    svg.append(el("text", { x: (x(i) + x(i + 1)) / 2, y: k === undefined ? y - 8 : y - 42, "text-anchor": "middle", "font-size": 12 }, l));
  });
  vertices.forEach((v, i) => {
    const phase = report.phase_vertices.includes(i);
    svg.append(el("circle", { cx: x(i), cy: y, r: 5, fill: phase ? "#222" : "#fff", stroke: "#222" }));
    svg.append(el("text", { x: x(i), y: y + 22, "text-anchor": "middle", "font-size": 11, fill: "#555" }, v));
  });
  return svg;
}

function show(target, fn) {
  target.replaceChildren();
  try {
    fn(target);
  } catch (e) {
    target.append(el("p", { class: "err" }, String(e)));
  }
}

function table(rows, head) {
  const t = el("table");
  const tr = el("tr");
  head.forEach((h) => tr.append(el("th", {}, h)));
  t.append(tr);
  rows.forEach((r) => {
    const row = el("tr");
    r.forEach((c) => row.append(el("td", {}, c === undefined || c === null ? "" : String(c))));
    t.append(row);
  });
  return t;
}

await init();
const all = JSON.parse(groups());
for (const g of all) $("group").append(el("option", { value: g.name }, g.name));
const current = () => $("group").value;
function describe() {
  const g = all.find((x) => x.name === current());
  $("presentation").textContent =
    `X = {${g.generators.join(", ")}}, ${g.subgroups.join(", ")}, relators: ${g.relators.join("; ")}`;
}
$("group").value = "bs12";
describe();
$("group").addEventListener("change", describe);

$("cgo").addEventListener("click", () => show($("cout"), (out) => {
  const r = JSON.parse(components(current(), $("cword").value));
  out.append(drawPath(r));
  out.append(table(r.components.map((c, k) => [k + 1, c.subgroup, c.value, c.s_minus, c.s_plus, c.x_span, r.isolated[k] ? "isolated" : "connected"]),
    ["#", "subgroup", "value", "s-", "s+", "X-span", ""]));
  out.append(el("p", {}, r.backtracking ? "The path backtracks." : "No backtracking."));
}));

$("ggo").addEventListener("click", () => show($("gout"), (out) => {
  const r = JSON.parse(geodesic(current(), $("gword").value));
  out.append(el("p", {}, `${r.element}: |g|_X = ${r.x_length}, relative length ${r.rel_length}, geodesic ${r.path.word || "(empty)"}`));
  out.append(drawPath({ ...r.components, path: r.path }));
}));

$("ago").addEventListener("click", () => show($("aout"), (out) => {
  const word = $("aword").value;
  const r = JSON.parse(area(current(), word, Number($("amax").value)));
  if (r.area === null) {
    out.append(el("p", {}, `No filling within the cap (${r.states} states explored).`));
    return;
  }
  out.append(el("p", {}, `Area ${r.area}. Certificate ${verify(current(), word, JSON.stringify(r.certificate)) ? "verifies" : "FAILS"}.`));
  out.append(table(r.trace.map((t, i) => [i, t.relator, t.position, t.word || "(empty)"]), ["step", "relator", "position", "word"]));
  out.append(el("pre", {}, JSON.stringify(r.certificate, null, 2)));
}));
