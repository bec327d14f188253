/**
 * three.js rendering of the point cloud: original colors on load, heatmap
 * colors after a query, optional isolation of one node's points.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { PointStream } from "./api";

export class PointCloudView {
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly renderer: THREE.WebGLRenderer;
  private readonly controls: OrbitControls;
  private points: THREE.Points | null = null;
  private baseColors: Uint8Array | null = null;

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(55, 1, 0.01, 100);
    this.camera.position.set(3, 3, 2);
    this.camera.up.set(0, 0, 1);
    this.controls = new OrbitControls(this.camera, canvas);
    this.scene.background = new THREE.Color(0x10131a);
    const animate = () => {
      requestAnimationFrame(animate);
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  resize(width: number, height: number): void {
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  loadPoints(stream: PointStream): void {
    if (this.points) {
      this.scene.remove(this.points);
      this.points.geometry.dispose();
    }
    this.baseColors = stream.colors.slice();
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute("position", new THREE.BufferAttribute(stream.positions, 3));
    const floatColors = new Float32Array(stream.colors.length);
    for (let i = 0; i < stream.colors.length; i++) {
      floatColors[i] = stream.colors[i] / 255;
    }
    geometry.setAttribute("color", new THREE.BufferAttribute(floatColors, 3));
    geometry.computeBoundingSphere();
    const material = new THREE.PointsMaterial({ size: 0.02, vertexColors: true });
    this.points = new THREE.Points(geometry, material);
    this.scene.add(this.points);
    const sphere = geometry.boundingSphere;
    if (sphere) {
      this.controls.target.copy(sphere.center);
      const d = Math.max(1, sphere.radius * 2.2);
      this.camera.position.set(sphere.center.x + d, sphere.center.y + d, sphere.center.z + d * 0.7);
    }
  }

  /** Apply per-point u8 RGB colors (length 3N). */
  applyColors(colors: Uint8Array): void {
    if (!this.points) return;
    const attr = this.points.geometry.getAttribute("color") as THREE.BufferAttribute;
    const data = attr.array as Float32Array;
    for (let i = 0; i < colors.length; i++) {
      data[i] = colors[i] / 255;
    }
    attr.needsUpdate = true;
  }

  restoreOriginalColors(): void {
    if (this.baseColors) this.applyColors(this.baseColors);
  }

  /** Show only the given points (others shrink to invisible alpha). */
  isolate(pointIndices: number[] | null): void {
    if (!this.points) return;
    const geometry = this.points.geometry;
    const position = geometry.getAttribute("position") as THREE.BufferAttribute;
    const n = position.count;
    if (pointIndices === null) {
      geometry.setDrawRange(0, n);
      delete geometry.userData.isolated;
      if (geometry.index) geometry.setIndex(null);
      return;
    }
    geometry.setIndex(pointIndices);
    geometry.setDrawRange(0, pointIndices.length);
    geometry.userData.isolated = true;
  }
}
