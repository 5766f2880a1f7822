import init, { ball_sum, newton, homs } from "./pkg/hyperval_web.js";

const PRESETS = {
  "Q2": 'name = "Q2"\np = 2\neisenstein = [-2, 1]\nprecision = 16\n',
  "Q3": 'name = "Q3"\np = 3\neisenstein = [-3, 1]\nprecision = 16\n',
  "Q2(sqrt2)": 'name = "Q2(sqrt2)"\np = 2\neisenstein = [-2, 0, 1]\nprecision = 24\n',
  "Q2(cbrt2)": 'name = "Q2(cbrt2)"\np = 2\neisenstein = [-2, 0, 0, 1]\nprecision = 24\n',
  "Q3(sqrt3)": 'name = "Q3(sqrt3)"\np = 3\neisenstein = [-3, 0, 1]\nprecision = 24\n',
  "Q3(sqrt-3)": 'name = "Q3(sqrt-3)"\np = 3\neisenstein = [3, 0, 1]\nprecision = 24\n',
  "Q3(cbrt3)": 'name = "Q3(cbrt3)"\np = 3\neisenstein = [-3, 0, 0, 1]\nprecision = 24\n',
  "Q9": 'name = "Q9"\np = 3\nf = 2\nmodulus = [1, 0, 1]\neisenstein = [-3, 1]\nprecision = 12\n',
};

const $ = (id) => document.getElementById(id);

function fillPresets(selectId, textId, initial) {
  const sel = $(selectId);
  for (const name of Object.keys(PRESETS)) {
    sel.add(new Option(name, name, false, name === initial));
  }
  if (textId) {
    const sync = () => { $(textId).value = PRESETS[sel.value]; };
    sel.addEventListener("change", sync);
    sync();
  }
}

function show(outId, text) {
  const data = JSON.parse(text);
  const out = $(outId);
  out.className = data.error ? "err" : "";
  return [data, out];
}

function runBall() {
  const [d, out] = show("ball-out", ball_sum(
    $("ball-field").value, +$("ball-n").value, $("ball-x").value, $("ball-y").value,
    +$("ball-lo").value, +$("ball-hi").value));
  if (d.error) { out.textContent = d.error; return; }
  const lines = [
    `${d.x.class} + ${d.y.class} = ${d.ball}`,
    `contains 0: ${d.contains_zero}`,
    `members in the level window: ${d.member_count}` +
      (d.members.length < d.member_count ? ` (first ${d.members.length} shown)` : ""),
    ...d.members.map((c) => `  ${c.class}   ν = ${c.valuation}`),
  ];
  out.textContent = lines.join("\n");
}

function plotNewton(d) {
  const svg = $("newton-plot");
  const W = +svg.getAttribute("width"), H = +svg.getAttribute("height"), pad = 36;
  const pts = d.points.map(([i, lvl, e]) => [i, lvl / e]);
  const maxX = Math.max(...pts.map((p) => p[0]), 1);
  const maxY = Math.max(...pts.map((p) => p[1]), 1);
  const sx = (x) => pad + (x / maxX) * (W - 2 * pad);
  const sy = (y) => H - pad - (y / maxY) * (H - 2 * pad);
  const parts = [
    `<line x1="${pad}" y1="${H - pad}" x2="${W - pad}" y2="${H - pad}" stroke="#888"/>`,
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${H - pad}" stroke="#888"/>`,
    `<text x="${W - pad}" y="${H - 10}" text-anchor="end">i</text>`,
    `<text x="8" y="${pad - 10}">ν(a_i)</text>`,
  ];
  const first = pts.reduce((a, b) => (a[0] <= b[0] ? a : b));
  let [x, y] = first;
  for (const s of d.segments) {
    const [num, den = 1] = s.slope.split("/").map(Number);
    const nx = x + s.length, ny = y + (num / den) * s.length;
    parts.push(`<line x1="${sx(x)}" y1="${sy(y)}" x2="${sx(nx)}" y2="${sy(ny)}" stroke="#c33" stroke-width="2"/>`);
    parts.push(`<text x="${sx((x + nx) / 2)}" y="${sy((y + ny) / 2) - 8}" fill="#c33" font-size="12">${s.slope}</text>`);
    [x, y] = [nx, ny];
  }
  for (const [px, py] of pts) {
    parts.push(`<circle cx="${sx(px)}" cy="${sy(py)}" r="4" fill="#226"/>`);
    parts.push(`<text x="${sx(px) + 6}" y="${sy(py) + 14}" font-size="11">(${px}, ${+py.toFixed(3)})</text>`);
  }
  svg.innerHTML = parts.join("");
}

function runNewton() {
  const [d, out] = show("newton-out", newton($("newton-field").value));
  if (d.error) { out.textContent = d.error; $("newton-plot").innerHTML = ""; return; }
  plotNewton(d);
  out.textContent = [
    `${d.name}: e = ${d.e}`,
    `segments: ${d.segments.map((s) => `slope ${s.slope} × ${s.length}`).join(", ") || "none"}`,
    `Krasner number M(K) = ${d.krasner}`,
  ].join("\n");
}

function runHoms() {
  const [d, out] = show("homs-out", homs(
    PRESETS[$("homs-preset1").value], +$("homs-n").value,
    PRESETS[$("homs-preset2").value], +$("homs-m").value,
    $("homs-overp").checked, +$("homs-budget").value));
  if (d.error) { out.textContent = d.error; return; }
  out.textContent = [
    `${d.count} homomorphisms (${d.candidates} candidates checked)`,
    ...(d.reason ? [d.reason] : []),
    ...d.homs.map((h) => `  σ = Frob^${h.sigma_frobenius_power}, [π] ↦ ${h.pi_image}${h.over_p ? ", over p" : ""}`),
  ].join("\n");
}

await init();
fillPresets("ball-preset", "ball-field", "Q2");
fillPresets("newton-preset", "newton-field", "Q2(sqrt2)");
fillPresets("homs-preset1", null, "Q3(sqrt3)");
fillPresets("homs-preset2", null, "Q3(sqrt-3)");
$("ball-go").addEventListener("click", runBall);
$("newton-go").addEventListener("click", runNewton);
$("homs-go").addEventListener("click", runHoms);
runBall();
runNewton();
