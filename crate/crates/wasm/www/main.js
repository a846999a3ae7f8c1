import init, { Demo } from "./pkg/chromadiff_wasm.js";

const $ = (id) => document.getElementById(id);
let demo = null;

function paint(canvasId, rgba) {
  const canvas = $(canvasId);
  canvas.width = demo.width;
  canvas.height = demo.height;
  const image = new ImageData(new Uint8ClampedArray(rgba), demo.width, demo.height);
  canvas.getContext("2d").putImageData(image, 0, 0);
}

function clear(canvasId) {
  const canvas = $(canvasId);
  canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
}

function run(action) {
  $("status").textContent = "";
  try {
    action();
  } catch (err) {
    $("status").textContent = String(err.message ?? err);
  }
}

function showInput() {
  paint("clean", demo.clean_rgba());
  paint("noisy", demo.noisy_rgba());
  $("noisy-caption").textContent = `noisy: ${demo.noisy_psnr().toFixed(2)} dB`;
  clear("restored");
  clear("diagnostic");
  $("restored-caption").textContent = "restored";
}

function noiseParams() {
  return [Number($("sigma-n").value), Number($("seed").value) >>> 0];
}

function generate() {
  run(() => {
    demo?.free();
    demo = new Demo($("kind").value, Number($("size").value), ...noiseParams());
    showInput();
  });
}

async function upload(file) {
  const bitmap = await createImageBitmap(file);
  const scale = Math.min(1, 512 / Math.max(bitmap.width, bitmap.height));
  const [w, h] = [Math.round(bitmap.width * scale), Math.round(bitmap.height * scale)];
  const ctx = new OffscreenCanvas(w, h).getContext("2d");
  ctx.drawImage(bitmap, 0, 0, w, h);
  const pixels = ctx.getImageData(0, 0, w, h).data;
  run(() => {
    demo?.free();
    demo = Demo.from_rgba(w, h, new Uint8Array(pixels.buffer), ...noiseParams());
    showInput();
  });
}

function denoise() {
  if (!demo) return;
  run(() => {
    const started = performance.now();
    const result = demo.denoise(
      $("scheme").value,
      Number($("iters").value),
      Number($("dt").value),
      Number($("gain").value),
    );
    const ms = performance.now() - started;
    paint("restored", result.rgba());
    $("restored-caption").textContent =
      `restored: ${result.psnr_db.toFixed(2)} dB, MSSIM ${result.mssim.toFixed(4)} (${ms.toFixed(0)} ms)`;
    result.free();
  });
}

function showMap() {
  if (!demo) return;
  run(() => {
    paint("diagnostic", demo.diagnostic($("map").value));
    $("map-caption").textContent = $("map").selectedOptions[0].textContent;
  });
}

await init();
$("generate").addEventListener("click", generate);
$("file").addEventListener("change", (e) => e.target.files[0] && upload(e.target.files[0]));
$("denoise").addEventListener("click", denoise);
$("show-map").addEventListener("click", showMap);
$("gain").addEventListener("input", (e) => ($("gain-value").textContent = Number(e.target.value).toFixed(2)));
generate();
