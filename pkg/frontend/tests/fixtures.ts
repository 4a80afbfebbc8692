// Canned API data and a recording fake fetch for dashboard tests.

import type { AgencyPost, EventDetail, EventSummary, MediaEntry, RelatedEvent, TermEntry } from "../src/types.js";

export function summary(id: string, overrides: Partial<EventSummary> = {}): EventSummary {
    return {
        id,
        headline: `headline for ${id}`,
        category: "fire",
        location: { place_name: "sydney", lon: 151.2093, lat: -33.8688, confidence: 1.0 },
        first_seen: "2014-01-05T00:00:00Z",
        last_seen: "2014-01-05T06:00:00Z",
        post_count: 4,
        flagged_angry: false,
        ...overrides,
    };
}

export function detail(id: string, overrides: Partial<EventDetail> = {}): EventDetail {
    return {
        ...summary(id),
        unique_text_count: 2,
        sentiment: { mean_polarity: -0.2, angry_fraction: 0.25, flagged_angry: true },
        content: [
            {
                id: "p2",
                author: "casey",
                created_at: "2014-01-05T01:00:00Z",
                text: "fire front moving",
                is_retweet: false,
                occurrences: 1,
            },
            {
                id: "p1",
                author: "sam",
                created_at: "2014-01-05T00:00:00Z",
                text: "bushfire at ridge",
                is_retweet: false,
                occurrences: 3,
            },
        ],
        ...overrides,
    };
}

export interface FakeApi {
    events: EventSummary[];
    terms: TermEntry[];
    agencies: AgencyPost[];
    details: Record<string, EventDetail>;
    related: Record<string, RelatedEvent[]>;
    media: Record<string, MediaEntry[]>;
}

export function defaultFakeApi(): FakeApi {
    return {
        events: [summary("ev-1"), summary("ev-2", { location: null, category: "flood" })],
        terms: [
            { term: "bushfire", weight: 9 },
            { term: "ridge", weight: 4 },
            { term: "smoke", weight: 2 },
        ],
        agencies: [
            { id: "a1", author: "nswrfs", created_at: "2014-01-05T02:00:00Z", text: "stay informed" },
        ],
        details: { "ev-1": detail("ev-1"), "ev-2": detail("ev-2") },
        related: {
            "ev-1": [{ ...summary("ev-2"), score: 0.61 }],
            "ev-2": [],
        },
        media: {
            "ev-1": [
                {
                    id: "m1",
                    url: "https://img.example/m1.jpg",
                    origin: "post_embedded",
                    created_at: "2014-01-05T01:00:00Z",
                    coords: null,
                    score: 1.0,
                },
            ],
            "ev-2": [],
        },
    };
}

export interface RecordingFetch {
    fetch: typeof fetch;
    requests: string[];
    failNext: { on: boolean };
}

// Serves the fake data and records every path it was asked for.
export function recordingFetch(data: FakeApi): RecordingFetch {
    const requests: string[] = [];
    const failNext = { on: false };

    const respond = (body: unknown, status = 200): Response =>
        new Response(JSON.stringify(body), {
            status,
            headers: { "content-type": "application/json" },
        });

    const fakeFetch = async (input: RequestInfo | URL): Promise<Response> => {
        const url = String(input);
        const path = url.replace(/^https?:\/\/[^/]+/, "");
        requests.push(path);
        if (failNext.on) {
            throw new TypeError("network down");
        }
        const [route] = path.split("?");
        if (route === "/events") return respond(data.events);
        if (route === "/terms") return respond(data.terms);
        if (route === "/agencies") return respond(data.agencies);
        if (route === "/health") {
            return respond({ status: "ok", snapshot_seq: 1, posts_ingested: 10, events_count: data.events.length });
        }
        const detailMatch = route.match(/^\/events\/([^/]+)$/);
        if (detailMatch) {
            const found = data.details[decodeURIComponent(detailMatch[1])];
            return found ? respond(found) : respond({ detail: "unknown" }, 404);
        }
        const relatedMatch = route.match(/^\/events\/([^/]+)\/related$/);
        if (relatedMatch) {
            const found = data.related[decodeURIComponent(relatedMatch[1])];
            return found ? respond(found) : respond({ detail: "unknown" }, 404);
        }
        const mediaMatch = route.match(/^\/events\/([^/]+)\/media$/);
        if (mediaMatch) {
            const found = data.media[decodeURIComponent(mediaMatch[1])];
            return found ? respond(found) : respond({ detail: "unknown" }, 404);
        }
        return respond({ detail: "no route" }, 404);
    };

    return { fetch: fakeFetch as typeof fetch, requests, failNext };
}

export function flush(): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, 0));
}
