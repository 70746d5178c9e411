/* tslint:disable */
/* eslint-disable */

/**
 * Anomaly matrix, flux totals and realizability of a catalog scenario.
 */
export function anomaly_scenario(name: string): string;

/**
 * Disorder-averaged G or S correlator with its decay fit.
 */
export function edge_correlator(operator: string, n: number, samples: number, seed: number, m: number, g: number): string;

export function scenario_names(): string;

/**
 * Ground-state charge of the edge ring for windings `w_min..=w_max`.
 */
export function spectral_flow(n: number, m: number, wilson: number, w_min: number, w_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly anomaly_scenario: (a: number, b: number) => [number, number];
    readonly edge_correlator: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly scenario_names: () => [number, number];
    readonly spectral_flow: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
