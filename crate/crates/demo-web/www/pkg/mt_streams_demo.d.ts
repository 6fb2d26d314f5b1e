/* tslint:disable */
/* eslint-disable */

/**
 * Linear complexity of each prefix of one output bit of the indexed
 * status `seed`, sampled every `stride` bits.
 */
export function complexity_profile(seed: number, bit_offset: number, n_bits: number, stride: number): Uint32Array;

/**
 * Overlap probability for `streams` substreams of `2^e` draws,
 * `e = 0..=max_log2_length`.
 */
export function overlap_curve(period_log2: number, streams: number, max_log2_length: number): Float64Array;

/**
 * Null law of the walk maximum followed by the observed frequencies over
 * `walks` walks of `steps` steps from the indexed status `seed`; both
 * halves have `steps + 1` entries.
 */
export function walk_maximum(seed: number, walks: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly complexity_profile: (a: number, b: number, c: number, d: number) => [number, number];
    readonly overlap_curve: (a: number, b: number, c: number) => [number, number];
    readonly walk_maximum: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
