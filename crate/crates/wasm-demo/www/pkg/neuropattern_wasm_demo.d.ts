/* tslint:disable */
/* eslint-disable */

/**
 * Spike counts per input pixel for a synthetic pattern, row-major over the
 * 16×16 grid, plus the total with and without the added noise.
 */
export function pattern_heatmap(shape: string, scale: number, row: number, col: number, jiggle: number, noise_percent: number, steps: number, seed: bigint): string;

/**
 * Network size for `n` output groups and the cost of one more.
 */
export function resources(n_groups: number): string;

/**
 * Weight of one pattern-rule synapse over `steps` simulator steps. The
 * postsynaptic neuron fires every step; the presynaptic one every
 * `pre_period` steps (never when 0).
 */
export function weight_trajectory(pre_period: number, initial_weight: number, steps: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly pattern_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
    readonly resources: (a: number) => [number, number, number, number];
    readonly weight_trajectory: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
