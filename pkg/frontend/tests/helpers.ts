import { readFileSync } from "node:fs";
import { join } from "node:path";

export function recorded<T>(name: string): T {
  const path = join(__dirname, "recorded", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export interface FetchCall {
  url: string;
  method: string;
  body: unknown;
}

export interface FetchStub {
  calls: FetchCall[];
  restore: () => void;
}

type Route = {
  method?: string;
  match: string | RegExp;
  status?: number;
  body: unknown;
};

/** Install a recording fetch stub; routes are matched in order. */
export function stubFetch(routes: Route[]): FetchStub {
  const calls: FetchCall[] = [];
  const original = globalThis.fetch;
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({
      url,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : null,
    });
    for (const route of routes) {
      const methodOk = (route.method ?? "GET") === method;
      const urlOk =
        typeof route.match === "string" ? url.includes(route.match) : route.match.test(url);
      if (methodOk && urlOk) {
        return new Response(JSON.stringify(route.body), {
          status: route.status ?? 200,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ code: "not-found", message: `no route: ${url}` }), {
      status: 404,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return {
    calls,
    restore: () => {
      globalThis.fetch = original;
    },
  };
}

export function container(): HTMLElement {
  document.body.innerHTML = '<main id="app"></main>';
  return document.querySelector("#app") as HTMLElement;
}
