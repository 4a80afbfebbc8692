// Thin typed client over the analytics API. Filter-driven requests are
// cancellable: issuing a new one aborts the previous in-flight call so a
// stale response can never overwrite a newer view.

import type {
    AgencyPost,
    EventDetail,
    EventSummary,
    Health,
    MediaEntry,
    RelatedEvent,
    TermEntry,
} from "./types.js";

export class ApiError extends Error {
    constructor(public status: number, message: string) {
        super(message);
    }
}

export class ApiClient {
    private controllers = new Map<string, AbortController>();
    public log: string[] = [];

    constructor(
        private base: string,
        private fetcher: typeof fetch = fetch.bind(globalThis),
    ) {}

    private async get<T>(path: string, cancelKey?: string): Promise<T> {
        let signal: AbortSignal | undefined;
        if (cancelKey) {
            this.controllers.get(cancelKey)?.abort();
            const controller = new AbortController();
            this.controllers.set(cancelKey, controller);
            signal = controller.signal;
        }
        this.log.push(path);
        const response = await this.fetcher(`${this.base}${path}`, { signal });
        if (!response.ok) {
            throw new ApiError(response.status, `${path} -> ${response.status}`);
        }
        return (await response.json()) as T;
    }

    events(query: string): Promise<EventSummary[]> {
        return this.get<EventSummary[]>(query, "events");
    }

    terms(query: string): Promise<TermEntry[]> {
        return this.get<TermEntry[]>(query, "terms");
    }

    eventDetail(id: string): Promise<EventDetail> {
        return this.get<EventDetail>(`/events/${encodeURIComponent(id)}`);
    }

    related(id: string): Promise<RelatedEvent[]> {
        return this.get<RelatedEvent[]>(`/events/${encodeURIComponent(id)}/related`);
    }

    media(id: string): Promise<MediaEntry[]> {
        return this.get<MediaEntry[]>(`/events/${encodeURIComponent(id)}/media`);
    }

    agencies(limit = 50): Promise<AgencyPost[]> {
        return this.get<AgencyPost[]>(`/agencies?limit=${limit}`, "agencies");
    }

    health(): Promise<Health> {
        return this.get<Health>("/health");
    }
}
