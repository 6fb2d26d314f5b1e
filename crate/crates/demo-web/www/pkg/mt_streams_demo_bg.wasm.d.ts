/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const complexity_profile: (a: number, b: number, c: number, d: number) => [number, number];
export const overlap_curve: (a: number, b: number, c: number) => [number, number];
export const walk_maximum: (a: number, b: number, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
