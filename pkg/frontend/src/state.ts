// The dashboard's single source of truth for what the operator is
// looking at. Every server query is derived from this state, so the UI
// can never filter differently than the API does.

export interface Bounds {
    minLon: number;
    minLat: number;
    maxLon: number;
    maxLat: number;
}

export type Tab = "events" | "agencies";

export interface ViewState {
    tab: Tab;
    viewport: Bounds;
    geotagged: boolean;
    category: string | null;
    keyword: string | null;
    since: string | null;
    until: string | null;
    selectedEvent: string | null;
    kiosk: boolean;
    refreshSeconds: number;
}

export const DEFAULT_VIEWPORT: Bounds = {
    minLon: 112,
    minLat: -44,
    maxLon: 155,
    maxLat: -9,
};

export function initialState(search: string): ViewState {
    const params = new URLSearchParams(search);
    const kiosk = params.get("kiosk") === "1";
    const refresh = Number(params.get("refresh"));
    return {
        tab: "events",
        viewport: { ...DEFAULT_VIEWPORT },
        geotagged: true,
        category: null,
        keyword: null,
        since: null,
        until: null,
        selectedEvent: null,
        kiosk,
        refreshSeconds: Number.isFinite(refresh) && refresh > 0 ? refresh : kiosk ? 30 : 0,
    };
}

function round(value: number): string {
    return value.toFixed(4);
}

// Query string for /events and /terms. The bounding box is sent only
// while the geotag toggle is on; with it off the server must fall back
// to time, keyword, and category filtering, so the bbox is omitted.
export function filterParams(state: ViewState): URLSearchParams {
    const params = new URLSearchParams();
    if (state.geotagged) {
        const v = state.viewport;
        params.set("bbox", `${round(v.minLon)},${round(v.minLat)},${round(v.maxLon)},${round(v.maxLat)}`);
    }
    params.set("geotagged", state.geotagged ? "true" : "false");
    if (state.category) params.set("category", state.category);
    if (state.keyword) params.set("q", state.keyword);
    if (state.since) params.set("since", state.since);
    if (state.until) params.set("until", state.until);
    return params;
}

export function eventsQuery(state: ViewState): string {
    return `/events?${filterParams(state).toString()}`;
}

export function termsQuery(state: ViewState, k = 40): string {
    const params = filterParams(state);
    params.set("k", String(k));
    return `/terms?${params.toString()}`;
}
