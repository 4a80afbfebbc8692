// API response shapes, mirroring the service's JSON exactly.

export interface EventLocation {
    place_name: string;
    lon: number;
    lat: number;
    confidence: number;
}

export interface EventSummary {
    id: string;
    headline: string;
    category: string;
    location: EventLocation | null;
    first_seen: string;
    last_seen: string;
    post_count: number;
    flagged_angry: boolean;
}

export interface RelatedEvent extends EventSummary {
    score: number;
}

export interface ContentEntry {
    id: string;
    author: string;
    created_at: string;
    text: string;
    is_retweet: boolean;
    occurrences: number;
}

export interface EventDetail extends EventSummary {
    unique_text_count: number;
    sentiment: {
        mean_polarity: number;
        angry_fraction: number;
        flagged_angry: boolean;
    };
    content: ContentEntry[];
}

export interface MediaEntry {
    id: string;
    url: string;
    origin: string;
    created_at: string;
    coords: number[] | null;
    score: number;
}

export interface TermEntry {
    term: string;
    weight: number;
}

export interface AgencyPost {
    id: string;
    author: string;
    created_at: string;
    text: string;
}

export interface Health {
    status: string;
    snapshot_seq: number;
    posts_ingested: number;
    events_count: number;
}

export const CATEGORIES = ["fire", "flood", "storm", "earthquake", "medical", "other"] as const;
export type Category = (typeof CATEGORIES)[number];
