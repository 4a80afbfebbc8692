// Self-contained SVG map pane. The viewport IS the geographic filter:
// every pan or zoom reports the new bounds so the app can re-query.
//
// Markers are deliberately small uniform dots; dense areas collapse into
// neutral count badges instead of piling up alarm icons. A wall of
// disaster symbols reads as catastrophe to untrained eyes, so the map
// never renders per-category iconography.

import type { EventSummary } from "./types.js";
import type { Bounds } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CLUSTER_PX = 28;

export interface MapCallbacks {
    onViewportChange(bounds: Bounds): void;
    onSelectEvent(id: string): void;
}

interface Cluster {
    x: number;
    y: number;
    members: EventSummary[];
}

export class MapPane {
    readonly svg: SVGSVGElement;
    private bounds: Bounds;
    private width = 800;
    private height = 520;
    private markerLayer: SVGGElement;
    private dragging: { x: number; y: number } | null = null;
    private events: EventSummary[] = [];

    constructor(
        container: HTMLElement,
        initial: Bounds,
        private callbacks: MapCallbacks,
        interactive = true,
    ) {
        this.bounds = { ...initial };
        this.svg = document.createElementNS(SVG_NS, "svg");
        this.svg.setAttribute("viewBox", `0 0 ${this.width} ${this.height}`);
        this.svg.setAttribute("class", "map-pane");
        this.svg.setAttribute("data-testid", "map");

        const backdrop = document.createElementNS(SVG_NS, "rect");
        backdrop.setAttribute("width", String(this.width));
        backdrop.setAttribute("height", String(this.height));
        backdrop.setAttribute("class", "map-backdrop");
        this.svg.appendChild(backdrop);

        const graticule = document.createElementNS(SVG_NS, "g");
        graticule.setAttribute("class", "map-graticule");
        this.svg.appendChild(graticule);
        this.graticuleLayer = graticule;

        this.markerLayer = document.createElementNS(SVG_NS, "g");
        this.svg.appendChild(this.markerLayer);
        container.appendChild(this.svg);

        if (interactive) {
            this.svg.addEventListener("pointerdown", (e) => this.startDrag(e));
            this.svg.addEventListener("pointermove", (e) => this.moveDrag(e));
            this.svg.addEventListener("pointerup", (e) => this.endDrag(e));
            this.svg.addEventListener("pointerleave", () => (this.dragging = null));
            this.svg.addEventListener("wheel", (e) => {
                e.preventDefault();
                this.zoom(e.deltaY < 0 ? 0.5 : 2.0);
            });
        }
        this.drawGraticule();
    }

    private graticuleLayer: SVGGElement;

    get viewport(): Bounds {
        return { ...this.bounds };
    }

    private lonSpan(): number {
        return this.bounds.maxLon - this.bounds.minLon;
    }

    private latSpan(): number {
        return this.bounds.maxLat - this.bounds.minLat;
    }

    project(lon: number, lat: number): { x: number; y: number } {
        const x = ((lon - this.bounds.minLon) / this.lonSpan()) * this.width;
        const y = ((this.bounds.maxLat - lat) / this.latSpan()) * this.height;
        return { x, y };
    }

    private unprojectDelta(dx: number, dy: number): { dlon: number; dlat: number } {
        return {
            dlon: (dx / this.width) * this.lonSpan(),
            dlat: (dy / this.height) * this.latSpan(),
        };
    }

    private startDrag(e: PointerEvent): void {
        this.dragging = { x: e.clientX, y: e.clientY };
    }

    private moveDrag(e: PointerEvent): void {
        if (!this.dragging) return;
        const { dlon, dlat } = this.unprojectDelta(
            this.dragging.x - e.clientX,
            e.clientY - this.dragging.y,
        );
        this.dragging = { x: e.clientX, y: e.clientY };
        this.shift(dlon, dlat);
    }

    private endDrag(_e: PointerEvent): void {
        if (!this.dragging) return;
        this.dragging = null;
        this.callbacks.onViewportChange(this.viewport);
    }

    // Pan by a fraction of the current span; emits the new viewport.
    pan(dxFraction: number, dyFraction: number): void {
        this.shift(this.lonSpan() * dxFraction, this.latSpan() * dyFraction);
        this.callbacks.onViewportChange(this.viewport);
    }

    private shift(dlon: number, dlat: number): void {
        this.bounds = {
            minLon: this.bounds.minLon + dlon,
            maxLon: this.bounds.maxLon + dlon,
            minLat: this.bounds.minLat + dlat,
            maxLat: this.bounds.maxLat + dlat,
        };
        this.render(this.events);
    }

    zoom(factor: number, centerLon?: number, centerLat?: number): void {
        const lonMid = centerLon ?? (this.bounds.minLon + this.bounds.maxLon) / 2;
        const latMid = centerLat ?? (this.bounds.minLat + this.bounds.maxLat) / 2;
        const lonHalf = (this.lonSpan() * factor) / 2;
        const latHalf = (this.latSpan() * factor) / 2;
        this.bounds = {
            minLon: lonMid - lonHalf,
            maxLon: lonMid + lonHalf,
            minLat: latMid - latHalf,
            maxLat: latMid + latHalf,
        };
        this.render(this.events);
        this.callbacks.onViewportChange(this.viewport);
    }

    private drawGraticule(): void {
        this.graticuleLayer.replaceChildren();
        for (let i = 1; i < 8; i++) {
            const vertical = document.createElementNS(SVG_NS, "line");
            vertical.setAttribute("x1", String((this.width / 8) * i));
            vertical.setAttribute("x2", String((this.width / 8) * i));
            vertical.setAttribute("y1", "0");
            vertical.setAttribute("y2", String(this.height));
            this.graticuleLayer.appendChild(vertical);
            const horizontal = document.createElementNS(SVG_NS, "line");
            horizontal.setAttribute("y1", String((this.height / 8) * i));
            horizontal.setAttribute("y2", String((this.height / 8) * i));
            horizontal.setAttribute("x1", "0");
            horizontal.setAttribute("x2", String(this.width));
            this.graticuleLayer.appendChild(horizontal);
        }
    }

    // Collapse markers that land within the same screen-space cell.
    clusters(events: EventSummary[]): Cluster[] {
        const cells = new Map<string, Cluster>();
        for (const event of events) {
            if (!event.location) continue;
            const { x, y } = this.project(event.location.lon, event.location.lat);
            if (x < 0 || x > this.width || y < 0 || y > this.height) continue;
            const key = `${Math.floor(x / CLUSTER_PX)}:${Math.floor(y / CLUSTER_PX)}`;
            const cluster = cells.get(key);
            if (cluster) {
                cluster.members.push(event);
            } else {
                cells.set(key, { x, y, members: [event] });
            }
        }
        return [...cells.values()];
    }

    render(events: EventSummary[]): void {
        this.events = events;
        this.markerLayer.replaceChildren();
        for (const cluster of this.clusters(events)) {
            if (cluster.members.length === 1) {
                const event = cluster.members[0];
                const dot = document.createElementNS(SVG_NS, "circle");
                dot.setAttribute("cx", String(cluster.x));
                dot.setAttribute("cy", String(cluster.y));
                dot.setAttribute("r", "5");
                dot.setAttribute("class", "map-dot");
                dot.setAttribute("data-event-id", event.id);
                dot.addEventListener("click", () => this.callbacks.onSelectEvent(event.id));
                const title = document.createElementNS(SVG_NS, "title");
                title.textContent = event.headline;
                dot.appendChild(title);
                this.markerLayer.appendChild(dot);
            } else {
                const group = document.createElementNS(SVG_NS, "g");
                group.setAttribute("class", "map-badge");
                group.setAttribute("data-count", String(cluster.members.length));
                const circle = document.createElementNS(SVG_NS, "circle");
                circle.setAttribute("cx", String(cluster.x));
                circle.setAttribute("cy", String(cluster.y));
                circle.setAttribute("r", "12");
                const label = document.createElementNS(SVG_NS, "text");
                label.setAttribute("x", String(cluster.x));
                label.setAttribute("y", String(cluster.y + 4));
                label.setAttribute("text-anchor", "middle");
                label.textContent = String(cluster.members.length);
                group.appendChild(circle);
                group.appendChild(label);
                // zooming in is the only action a badge offers
                group.addEventListener("click", () => {
                    const lon = cluster.members[0].location!.lon;
                    const lat = cluster.members[0].location!.lat;
                    this.zoom(0.5, lon, lat);
                });
                this.markerLayer.appendChild(group);
            }
        }
    }
}
