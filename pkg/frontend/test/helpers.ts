import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

type Route = { status: number; body: unknown } | ((init?: RequestInit) => { status: number; body: unknown });

/** Tiny fetch stub: routes keyed "METHOD path", consumed queues allowed. */
export function fakeFetch(routes: Record<string, Route | Route[]>): typeof fetch {
  const consumed: Record<string, number> = {};
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input).split("?")[0];
    const key = `${init?.method ?? "GET"} ${url}`;
    let route = routes[key];
    if (route === undefined) {
      throw new Error(`no stub for ${key}`);
    }
    if (Array.isArray(route)) {
      const index = consumed[key] ?? 0;
      consumed[key] = index + 1;
      const picked = route[Math.min(index, route.length - 1)];
      if (picked === undefined) {
        throw new Error(`stub queue for ${key} exhausted`);
      }
      route = picked;
    }
    const value = typeof route === "function" ? route(init) : route;
    return {
      ok: value.status >= 200 && value.status < 300,
      status: value.status,
      json: async () => value.body,
    } as Response;
  }) as typeof fetch;
}
