// Left-hand sidebar: the event list and the agency-post feed, switched
// by two tabs. Clicking an event row opens the detail dialog.

import type { AgencyPost, EventSummary } from "./types.js";
import type { Tab } from "./state.js";

export interface SidebarCallbacks {
    onSelectTab(tab: Tab): void;
    onSelectEvent(id: string): void;
    onRetry(): void;
}

export class Sidebar {
    readonly root: HTMLElement;
    private list: HTMLElement;
    private banner: HTMLElement;
    private tabButtons = new Map<Tab, HTMLButtonElement>();

    constructor(container: HTMLElement, private callbacks: SidebarCallbacks, interactive = true) {
        this.root = document.createElement("aside");
        this.root.className = "sidebar";
        this.root.dataset.testid = "sidebar";

        if (interactive) {
            const tabs = document.createElement("div");
            tabs.className = "sidebar-tabs";
            for (const tab of ["events", "agencies"] as Tab[]) {
                const button = document.createElement("button");
                button.textContent = tab === "events" ? "Events" : "Agencies";
                button.dataset.tab = tab;
                button.addEventListener("click", () => this.callbacks.onSelectTab(tab));
                this.tabButtons.set(tab, button);
                tabs.appendChild(button);
            }
            this.root.appendChild(tabs);
        }

        this.banner = document.createElement("div");
        this.banner.className = "error-banner hidden";
        this.root.appendChild(this.banner);

        this.list = document.createElement("div");
        this.list.className = "sidebar-list";
        this.root.appendChild(this.list);
        container.appendChild(this.root);
    }

    setActiveTab(tab: Tab): void {
        for (const [name, button] of this.tabButtons) {
            button.classList.toggle("active", name === tab);
        }
    }

    showError(message: string): void {
        this.banner.replaceChildren();
        this.banner.classList.remove("hidden");
        const text = document.createElement("span");
        text.textContent = message;
        const retry = document.createElement("button");
        retry.textContent = "Retry";
        retry.addEventListener("click", () => this.callbacks.onRetry());
        this.banner.append(text, retry);
    }

    clearError(): void {
        this.banner.classList.add("hidden");
        this.banner.replaceChildren();
    }

    renderEvents(events: EventSummary[]): void {
        this.list.replaceChildren();
        if (events.length === 0) {
            const empty = document.createElement("p");
            empty.className = "placeholder";
            empty.textContent = "no events match the current filters";
            this.list.appendChild(empty);
            return;
        }
        for (const event of events) {
            const row = document.createElement("div");
            row.className = "event-row";
            row.dataset.eventId = event.id;

            const headline = document.createElement("div");
            headline.className = "event-headline";
            headline.textContent = event.headline || "(no text)";

            const meta = document.createElement("div");
            meta.className = "event-meta";
            const bits = [
                event.category,
                `${event.post_count} posts`,
                event.location ? event.location.place_name : "no geotag",
            ];
            if (event.flagged_angry) bits.push("⚠ anger");
            meta.textContent = bits.join(" · ");

            row.append(headline, meta);
            row.addEventListener("click", () => this.callbacks.onSelectEvent(event.id));
            this.list.appendChild(row);
        }
    }

    renderAgencies(posts: AgencyPost[]): void {
        this.list.replaceChildren();
        if (posts.length === 0) {
            const empty = document.createElement("p");
            empty.className = "placeholder";
            empty.textContent = "no agency posts yet";
            this.list.appendChild(empty);
            return;
        }
        for (const post of posts) {
            const row = document.createElement("div");
            row.className = "agency-row";
            const author = document.createElement("div");
            author.className = "agency-author";
            author.textContent = `@${post.author} · ${post.created_at}`;
            const text = document.createElement("div");
            text.textContent = post.text;
            row.append(author, text);
            this.list.appendChild(row);
        }
    }
}
