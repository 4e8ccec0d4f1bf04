/* tslint:disable */
/* eslint-disable */

/**
 * Parse one article's wikitext. Returns the article record plus its counts.
 */
export function parse_wikitext(title: string, wikitext: string, lang: string): string;

/**
 * Length-weighted passage sample over blank-line separated passages.
 */
export function sample_text(passages: string, n: number, target: number, seed: bigint): string;

/**
 * Heuristic quality score and its 1..=5 label under the given cuts
 * (`{"cuts":[..]}`, empty string for the defaults).
 */
export function score_source(text: string, thresholds_json: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly parse_wikitext: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly sample_text: (a: number, b: number, c: number, d: number, e: bigint) => [number, number];
    readonly score_source: (a: number, b: number, c: number, d: number) => [number, number];
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
