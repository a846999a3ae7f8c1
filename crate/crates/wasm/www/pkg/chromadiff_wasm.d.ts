/* tslint:disable */
/* eslint-disable */

/**
 * Clean image, its noisy copy, and the most recent restoration.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    clean_rgba(): Uint8Array;
    denoise(scheme: string, iterations: number, dt: number, coupling_gain: number): Restored;
    diagnostic(which: string): Uint8Array;
    /**
     * Uses an uploaded image (canvas RGBA bytes) as the clean original.
     */
    static from_rgba(width: number, height: number, rgba: Uint8Array, sigma_n: number, seed: number): Demo;
    /**
     * Renders a synthetic image (`disk`, `stripes` or `checkerboard`) and
     * corrupts it with Gaussian noise of `sigma_n` on the 0..255 scale.
     */
    constructor(kind: string, size: number, sigma_n: number, seed: number);
    noisy_psnr(): number;
    noisy_rgba(): Uint8Array;
    readonly height: number;
    readonly width: number;
}

/**
 * A denoised image with its scores against the clean original.
 */
export class Restored {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    rgba(): Uint8Array;
    readonly mssim: number;
    readonly psnr_db: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_restored_free: (a: number, b: number) => void;
    readonly demo_clean_rgba: (a: number) => [number, number];
    readonly demo_denoise: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly demo_diagnostic: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_from_rgba: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly demo_height: (a: number) => number;
    readonly demo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly demo_noisy_psnr: (a: number) => number;
    readonly demo_noisy_rgba: (a: number) => [number, number];
    readonly demo_width: (a: number) => number;
    readonly restored_mssim: (a: number) => number;
    readonly restored_psnr_db: (a: number) => number;
    readonly restored_rgba: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
