/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_restored_free: (a: number, b: number) => void;
export const demo_clean_rgba: (a: number) => [number, number];
export const demo_denoise: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const demo_diagnostic: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_from_rgba: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const demo_height: (a: number) => number;
export const demo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const demo_noisy_psnr: (a: number) => number;
export const demo_noisy_rgba: (a: number) => [number, number];
export const demo_width: (a: number) => number;
export const restored_mssim: (a: number) => number;
export const restored_psnr_db: (a: number) => number;
export const restored_rgba: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
