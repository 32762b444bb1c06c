// Built with `wasm-pack build --target web --out-dir www/pkg` from crates/wasm-demo.
import init, {
  oracle_coefficients_json,
  injection_point_json,
  resource_report_json,
} from "./pkg/star_wasm_demo.js";

const VARIANTS = ["direct", "indirect_two_cnot", "indirect_ancilla"];
const $ = (id) => document.getElementById(id);

function fillVariants(id) {
  for (const v of VARIANTS) {
    const o = document.createElement("option");
    o.textContent = v;
    $(id).appendChild(o);
  }
}

function show(id, fn) {
  const out = $(id);
  try {
    out.className = "";
    out.textContent = JSON.stringify(JSON.parse(fn()), null, 2);
  } catch (e) {
    out.className = "error";
    out.textContent = String(e);
  }
}

const int = (id) => Number.parseInt($(id).value, 10);
const num = (id) => Number($(id).value);

async function main() {
  await init();
  ["o-variant", "m-variant", "r-variant"].forEach(fillVariants);

  $("o-run").onclick = () =>
    show("o-out", () => oracle_coefficients_json($("o-variant").value, int("o-d")));

  $("m-run").onclick = () => {
    $("m-out").textContent = "Sampling...";
    // Let the browser paint before the synchronous run.
    setTimeout(() =>
      show("m-out", () =>
        injection_point_json($("m-variant").value, int("m-d"), num("m-p"), int("m-shots"), int("m-seed"))
      ), 0);
  };

  $("r-run").onclick = () =>
    show("r-out", () =>
      resource_report_json(num("r-n"), num("r-p"), int("r-d"), $("r-scheme").value, $("r-variant").value)
    );

  for (const b of ["o-run", "m-run", "r-run"]) $(b).disabled = false;
  $("status").textContent = "Ready.";
}

main().catch((e) => {
  $("status").className = "error";
  $("status").textContent = `Failed to load module: ${e}`;
});
